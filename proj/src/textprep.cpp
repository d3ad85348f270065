#include "survcode/textprep.hpp"

#include <fstream>
#include <regex>

#include "survcode/error.hpp"

namespace survcode::textprep {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at text[pos]; invalid sequences yield
// U+FFFD and consume a single byte.
char32_t decode(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(text[i]);
  };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + extra >= text.size()) {
    ++pos;
    return kReplacement;
  }
  for (int k = 1; k <= extra; ++k) {
    if ((byte(pos + k) & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (byte(pos + k) & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::vector<char32_t> decode_all(std::string_view text) {
  std::vector<char32_t> cps;
  cps.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) cps.push_back(decode(text, pos));
  return cps;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  // Latin-1 uppercase block, skipping the multiplication sign.
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  return cp;
}

constexpr char32_t kCombiningDiaeresis = 0x0308;

bool is_whitespace(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' ||
         cp == '\f' || cp == 0xA0 || cp == 0x2007 || cp == 0x202F ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x3000;
}

bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Anything that is not a letter, digit, underscore or whitespace. Non-ASCII
// code points count as letters unless they sit in a punctuation or symbol
// block.
bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    const bool alnum = (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
                       is_digit(cp);
    return !alnum && cp != '_' && !is_whitespace(cp);
  }
  if (cp <= 0xBF) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2010 && cp <= 0x2BFF) return true;  // punctuation, symbols
  if (cp >= 0x3001 && cp <= 0x303F) return true;
  if (cp >= 0xFE30 && cp <= 0xFE4F) return true;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return true;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;  // emoji
  return cp == kReplacement;
}

std::string fold_and_lower(std::string_view text, bool fold_umlauts) {
  const auto cps = decode_all(text);
  std::string out;
  out.reserve(text.size() + 8);
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = to_lower(cps[i]);
    if (fold_umlauts) {
      const bool decomposed = i + 1 < cps.size() && cps[i + 1] == kCombiningDiaeresis;
      if (decomposed && (cp == 'a' || cp == 'o' || cp == 'u')) {
        out.push_back(static_cast<char>(cp));
        out.push_back('e');
        ++i;
        continue;
      }
      switch (cp) {
        case 0xE4: out += "ae"; continue;
        case 0xF6: out += "oe"; continue;
        case 0xFC: out += "ue"; continue;
        case 0xDF:
        case 0x1E9E: out += "ss"; continue;
        default: break;
      }
    }
    encode(cp, out);
  }
  return out;
}

std::string strip_and_collapse(std::string_view text, const NormalizationRules& rules) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t start = pos;
    const char32_t cp = decode(text, pos);
    const bool separator = is_whitespace(cp) ||
                           (rules.drop_numbers && is_digit(cp)) ||
                           (rules.drop_punctuation && is_punctuation(cp));
    if (separator) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(text.substr(start, pos - start));
  }
  return out;
}

std::vector<std::regex> compile(const std::vector<EntityRule>& rules) {
  std::vector<std::regex> compiled;
  compiled.reserve(rules.size());
  for (const auto& rule : rules) {
    try {
      compiled.emplace_back(rule.pattern,
                            std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw InvalidArgument("invalid entity pattern '" + rule.pattern + "': " + e.what());
    }
  }
  return compiled;
}

std::string normalize_compiled(std::string_view text, const NormalizationRules& rules,
                               const std::vector<std::regex>& compiled) {
  // Rules see cleaned text, so "die!!Grünen" and "die Grünen" merge alike
  // and a second normalize pass is a no-op.
  std::string cleaned = strip_and_collapse(fold_and_lower(text, rules.fold_umlauts), rules);
  if (compiled.empty()) return cleaned;
  for (std::size_t k = 0; k < compiled.size(); ++k) {
    cleaned = std::regex_replace(cleaned, compiled[k], rules.entity_rules[k].replacement);
  }
  return strip_and_collapse(cleaned, rules);
}

}  // namespace

NormalizationRules NormalizationRules::defaults() {
  NormalizationRules rules;
  rules.entity_rules = {
      {R"(\b(?:die|den|der)\s+gr(?:ue|ü)nen\b)", "die_gruenen"},
      {R"(\b(?:die|der)\s+linken?\b)", "die_linke"},
  };
  return rules;
}

void NormalizationRules::validate() const {
  for (const auto& rule : entity_rules) {
    for (const char c : rule.replacement) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        throw InvalidArgument("entity replacement '" + rule.replacement +
                              "' contains whitespace");
      }
    }
  }
  compile(entity_rules);
}

std::string normalize(std::string_view text, const NormalizationRules& rules) {
  rules.validate();
  return normalize_compiled(text, rules, compile(rules.entity_rules));
}

std::size_t codepoint_length(std::string_view token) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < token.size();) {
    decode(token, pos);
    ++n;
  }
  return n;
}

std::vector<std::string> tokenize(std::string_view normalized,
                                  const NormalizationRules& rules) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < normalized.size()) {
    while (pos < normalized.size() && normalized[pos] == ' ') ++pos;
    std::size_t end = pos;
    while (end < normalized.size() && normalized[end] != ' ') ++end;
    if (end > pos) {
      std::string_view token = normalized.substr(pos, end - pos);
      if (!(rules.drop_single_letters && codepoint_length(token) == 1)) {
        tokens.emplace_back(token);
      }
    }
    pos = end;
  }
  return tokens;
}

Lemmatizer Lemmatizer::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lemmatizer dictionary '" + path + "'");
  std::unordered_map<std::string, std::string> dictionary;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 'token<TAB>lemma'");
    }
    dictionary[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return Lemmatizer(std::move(dictionary));
}

std::string Lemmatizer::lemma(std::string_view token) const {
  if (const auto it = dictionary_.find(std::string(token)); it != dictionary_.end()) {
    return it->second;
  }
  return std::string(token);
}

Document lemmatize(Document doc, const Lemmatizer& lemmatizer) {
  if (lemmatizer.is_identity()) return doc;
  for (auto& token : doc.tokens) token = lemmatizer.lemma(token);
  return doc;
}

Document lemmatize(Document doc, const LemmaFunction& lemmatizer) {
  for (auto& token : doc.tokens) token = lemmatizer(token);
  return doc;
}

Preprocessor::Preprocessor(NormalizationRules rules, Lemmatizer lemmatizer)
    : rules_(std::move(rules)), lemmatizer_(std::move(lemmatizer)) {
  rules_.validate();
  compiled_ = compile(rules_.entity_rules);
}

Document Preprocessor::process(const RawAnswer& answer) const {
  Document doc;
  doc.record_id = answer.record_id;
  doc.tokens = tokenize(normalize_compiled(answer.text, rules_, compiled_), rules_);
  return lemmatize(std::move(doc), lemmatizer_);
}

}  // namespace survcode::textprep
