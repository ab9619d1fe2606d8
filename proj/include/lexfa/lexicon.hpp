#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexfa/ingest.hpp"

namespace lexfa {

enum class PartOfSpeech : std::uint8_t { noun = 0, adjective = 1 };

std::string_view pos_name(PartOfSpeech pos);
/// "noun"/"adjective" (also "n"/"a"); throws ParseError otherwise.
PartOfSpeech parse_pos_name(std::string_view name);

/// A synset: the database part of speech plus its byte offset in data.<pos>.
/// Adjective satellites share the adjective part of speech.
struct SenseId {
  PartOfSpeech pos = PartOfSpeech::noun;
  std::uint32_t offset = 0;

  auto operator<=>(const SenseId&) const = default;
};

struct SenseIdHash {
  std::size_t operator()(SenseId s) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{static_cast<std::uint8_t>(s.pos)} << 32) | s.offset);
  }
};

/// Unordered antonym pair stored with `first < second`.
using AntonymPair = std::pair<SenseId, SenseId>;

/// Noun and adjective portion of a WordNet-format lexical database.
///
/// Immutable once built; all lookups are const and safe to share across threads.
class Lexicon {
 public:
  /// Reads index.{noun,adj}, data.{noun,adj} and {noun,adj}.exc from `dir`.
  /// ConfigError when a file is missing, ParseError (file:line) when a line is malformed
  /// or references a synset that does not exist.
  static Lexicon load(const std::filesystem::path& dir);

  bool contains(std::string_view lemma, PartOfSpeech pos) const;
  /// Sense ids of a lemma in index order; empty when absent.
  std::span<const SenseId> senses(std::string_view lemma, PartOfSpeech pos) const;
  /// Base forms listed for an irregular form. Only bases present in the lexicon are kept.
  std::span<const std::string> exception_bases(std::string_view form, PartOfSpeech pos) const;

  bool has_synset(SenseId id) const { return synsets_.contains(id); }
  bool are_antonyms(SenseId a, SenseId b) const;
  /// Senses paired with `id` by an antonym pointer.
  std::span<const SenseId> antonyms_of(SenseId id) const;
  const std::set<AntonymPair>& antonym_pairs() const { return antonyms_; }

  std::size_t lemma_count(PartOfSpeech pos) const { return entries_[index(pos)].size(); }
  std::size_t exception_count(PartOfSpeech pos) const { return exceptions_[index(pos)].size(); }
  std::size_t synset_count() const { return synsets_.size(); }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  template <class V>
  using StringMap = std::unordered_map<std::string, V, StringHash, std::equal_to<>>;

  static constexpr std::size_t index(PartOfSpeech pos) { return static_cast<std::size_t>(pos); }

  StringMap<std::vector<SenseId>> entries_[2];
  StringMap<std::vector<std::string>> exceptions_[2];
  std::unordered_set<SenseId, SenseIdHash> synsets_;
  std::set<AntonymPair> antonyms_;
  std::unordered_map<SenseId, std::vector<SenseId>, SenseIdHash> antonym_partners_;
};

/// Base form of `word` for one part of speech: exception list first, then the detachment
/// suffix rules in order (first candidate present in the lexicon wins), then the word itself.
/// nullopt when none of these is a lemma of that part of speech.
std::optional<std::string> lemmatize(std::string_view word, PartOfSpeech pos, const Lexicon& lex);

struct Lemma {
  std::string text;
  PartOfSpeech pos = PartOfSpeech::noun;

  bool operator==(const Lemma&) const = default;
};

/// Dictionary-membership tagging: noun reading first, adjective second.
std::optional<Lemma> lemmatize_token(std::string_view token, const Lexicon& lex);

using StopwordSet = std::unordered_set<std::string>;

/// Built-in English function-word list.
const StopwordSet& default_stopwords();
/// One word per line, UTF-8; blank lines and '#' comments ignored; entries lowercased.
StopwordSet load_stopwords(const std::filesystem::path& path);

struct TermInfo {
  PartOfSpeech pos = PartOfSpeech::noun;
  std::size_t document_frequency = 0;

  bool operator==(const TermInfo&) const = default;
};

/// Ordered, deduplicated noun/adjective vocabulary. Column j of a document-term matrix is
/// `terms()[j]`.
class TermDictionary {
 public:
  TermDictionary() = default;
  /// Throws ValidationError on duplicate or empty terms or mismatched lengths.
  TermDictionary(std::vector<std::string> terms, std::vector<TermInfo> info);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const TermInfo& info(std::size_t column) const { return info_.at(column); }
  std::optional<std::size_t> index_of(std::string_view term) const;

  bool operator==(const TermDictionary& other) const { return terms_ == other.terms_ && info_ == other.info_; }

 private:
  std::vector<std::string> terms_;
  std::vector<TermInfo> info_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Builds the term dictionary of a corpus.
///
/// Stopword tokens are dropped before lemmatization; every other token is mapped with
/// `lemmatize_token`. Candidate lemmas are ranked by document frequency (descending, ties
/// alphabetical) and admitted greedily: a candidate sharing a sense id with an admitted term,
/// or holding a sense antonym-paired with one, is rejected. Candidates whose lemma is itself
/// a stopword are rejected too. Throws EmptyDictionaryError when nothing is admitted.
TermDictionary build_dictionary(std::span<const Review> corpus, const Lexicon& lex, const StopwordSet& stopwords,
                                unsigned threads = 1);

/// Tab-separated `term  pos  document_frequency` with a header line.
void write_dictionary(std::ostream& out, const TermDictionary& dict);
TermDictionary read_dictionary(std::istream& in, std::string_view origin = "<dictionary>");

}  // namespace lexfa
