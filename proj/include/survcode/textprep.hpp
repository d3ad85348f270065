#pragma once

#include <functional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace survcode::textprep {

struct RawAnswer {
  std::string record_id;
  std::string text;
};

// Regex applied globally (case-insensitive) to the folded, lowercased text.
// The replacement must not contain whitespace so it survives tokenization.
struct EntityRule {
  std::string pattern;
  std::string replacement;
};

struct NormalizationRules {
  bool fold_umlauts = true;
  std::vector<EntityRule> entity_rules;
  bool drop_single_letters = true;
  bool drop_numbers = true;
  bool drop_punctuation = true;

  // Umlaut folding plus the two party-name rules ("die Grünen",
  // "die Linke") for German survey answers.
  static NormalizationRules defaults();

  // Throws InvalidArgument for an uncompilable pattern or a replacement
  // containing whitespace.
  void validate() const;
};

struct Document {
  std::string record_id;
  std::vector<std::string> tokens;

  std::size_t token_count() const { return tokens.size(); }
};

// Lowercase, fold ä/ö/ü/ß (precomposed and decomposed), turn punctuation
// and digit runs into single spaces, then apply entity rules.
std::string normalize(std::string_view text, const NormalizationRules& rules);

std::vector<std::string> tokenize(std::string_view normalized,
                                  const NormalizationRules& rules);

// Number of UTF-8 code points in a token.
std::size_t codepoint_length(std::string_view token);

using LemmaFunction = std::function<std::string(std::string_view)>;

// Token -> lemma lookup; tokens missing from the dictionary pass through.
// An empty dictionary is the identity lemmatizer.
class Lemmatizer {
 public:
  Lemmatizer() = default;
  explicit Lemmatizer(std::unordered_map<std::string, std::string> dictionary)
      : dictionary_(std::move(dictionary)) {}

  // Tab-separated "token<TAB>lemma" lines; blank lines and '#' comments
  // are skipped.
  static Lemmatizer from_file(const std::string& path);

  std::string lemma(std::string_view token) const;
  bool is_identity() const { return dictionary_.empty(); }
  const std::unordered_map<std::string, std::string>& dictionary() const {
    return dictionary_;
  }

 private:
  std::unordered_map<std::string, std::string> dictionary_;
};

Document lemmatize(Document doc, const Lemmatizer& lemmatizer);
Document lemmatize(Document doc, const LemmaFunction& lemmatizer);

// normalize -> tokenize -> lemmatize in one call.
class Preprocessor {
 public:
  Preprocessor() : Preprocessor(NormalizationRules::defaults(), Lemmatizer{}) {}
  Preprocessor(NormalizationRules rules, Lemmatizer lemmatizer);

  Document process(const RawAnswer& answer) const;

  const NormalizationRules& rules() const { return rules_; }
  const Lemmatizer& lemmatizer() const { return lemmatizer_; }

 private:
  NormalizationRules rules_;
  Lemmatizer lemmatizer_;
  std::vector<std::regex> compiled_;
};

}  // namespace survcode::textprep
