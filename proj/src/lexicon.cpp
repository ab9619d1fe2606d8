#include "lexfa/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "lexfa/error.hpp"
#include "lexfa/parallel.hpp"

namespace lexfa {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    std::string_view f = line.substr(pos, end - pos);
    if (!f.empty() && f.back() == '\r') f.remove_suffix(1);
    if (!f.empty()) out.push_back(f);
    pos = end;
  }
  return out;
}

class LineReader {
 public:
  LineReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw ConfigError("lexical database file missing or unreadable: " + path.string());
  }

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_no() const { return line_no_; }

  template <class T>
  T number(std::string_view field, int base, const char* what) const {
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value, base);
    if (ec != std::errc() || ptr != field.data() + field.size())
      fail(std::string("bad ") + what + " '" + std::string(field) + "'");
    return value;
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

// License preamble lines in the database files start with a space.
bool is_preamble(const std::string& line) { return line.empty() || line[0] == ' '; }

std::optional<PartOfSpeech> pointer_pos(std::string_view code) {
  if (code == "n") return PartOfSpeech::noun;
  if (code == "a" || code == "s") return PartOfSpeech::adjective;
  return std::nullopt;
}

const char* file_suffix(PartOfSpeech pos) { return pos == PartOfSpeech::noun ? "noun" : "adj"; }

struct PendingAntonym {
  SenseId from;
  SenseId to;
  std::string where;
};

struct Rule {
  std::string_view suffix;
  std::string_view ending;
};

constexpr Rule kNounRules[] = {{"s", ""},      {"ses", "s"},    {"xes", "x"},    {"zes", "z"},
                               {"ches", "ch"}, {"shes", "sh"}, {"men", "man"}, {"ies", "y"}};
constexpr Rule kAdjectiveRules[] = {{"er", ""}, {"est", ""}, {"er", "e"}, {"est", "e"}};

std::span<const Rule> rules_for(PartOfSpeech pos) {
  if (pos == PartOfSpeech::noun) return kNounRules;
  return kAdjectiveRules;
}

}  // namespace

std::string_view pos_name(PartOfSpeech pos) { return pos == PartOfSpeech::noun ? "noun" : "adjective"; }

PartOfSpeech parse_pos_name(std::string_view name) {
  if (name == "noun" || name == "n") return PartOfSpeech::noun;
  if (name == "adjective" || name == "a" || name == "adj") return PartOfSpeech::adjective;
  throw ParseError("unknown part of speech '" + std::string(name) + "'");
}

Lexicon Lexicon::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("lexical database directory not found: " + dir.string());
  for (PartOfSpeech pos : {PartOfSpeech::noun, PartOfSpeech::adjective}) {
    for (std::string name : {std::string("index.") + file_suffix(pos), std::string("data.") + file_suffix(pos),
                             std::string(file_suffix(pos)) + ".exc"}) {
      if (!std::filesystem::is_regular_file(dir / name))
        throw ConfigError("lexical database file missing: " + (dir / name).string());
    }
  }

  Lexicon lex;
  std::vector<PendingAntonym> pending;
  std::string line;

  for (PartOfSpeech pos : {PartOfSpeech::noun, PartOfSpeech::adjective}) {
    LineReader data(dir / (std::string("data.") + file_suffix(pos)));
    while (data.next(line)) {
      if (is_preamble(line)) continue;
      std::string_view body = line;
      if (auto bar = body.find(" | "); bar != std::string_view::npos) body = body.substr(0, bar);
      auto f = split_fields(body);
      if (f.size() < 4) data.fail("truncated synset record");
      SenseId self{pos, data.number<std::uint32_t>(f[0], 10, "synset offset")};
      const std::string_view ss_type = f[2];
      if (pos == PartOfSpeech::noun ? ss_type != "n" : (ss_type != "a" && ss_type != "s"))
        data.fail("synset type '" + std::string(ss_type) + "' does not belong in this file");
      const auto words = data.number<std::size_t>(f[3], 16, "word count");
      std::size_t i = 4 + 2 * words;
      if (words == 0 || f.size() <= i) data.fail("truncated word list");
      const auto pointers = data.number<std::size_t>(f[i], 10, "pointer count");
      ++i;
      if (f.size() < i + 4 * pointers) data.fail("truncated pointer list");
      for (std::size_t p = 0; p < pointers; ++p, i += 4) {
        if (f[i] != "!") continue;
        auto target_pos = pointer_pos(f[i + 2]);
        if (!target_pos) continue;
        pending.push_back({self, SenseId{*target_pos, data.number<std::uint32_t>(f[i + 1], 10, "pointer offset")},
                           (dir / (std::string("data.") + file_suffix(pos))).string() + ":" +
                               std::to_string(data.line_no())});
      }
      if (!lex.synsets_.insert(self).second) data.fail("duplicate synset offset " + std::string(f[0]));
    }
  }

  for (const PendingAntonym& a : pending) {
    if (!lex.synsets_.contains(a.to))
      throw ParseError(a.where + ": antonym pointer to unknown synset " + std::to_string(a.to.offset));
    lex.antonyms_.insert(std::minmax(a.from, a.to));
  }
  for (const AntonymPair& pair : lex.antonyms_) {
    lex.antonym_partners_[pair.first].push_back(pair.second);
    lex.antonym_partners_[pair.second].push_back(pair.first);
  }

  for (PartOfSpeech pos : {PartOfSpeech::noun, PartOfSpeech::adjective}) {
    const char expected = pos == PartOfSpeech::noun ? 'n' : 'a';
    LineReader index(dir / (std::string("index.") + file_suffix(pos)));
    auto& entries = lex.entries_[Lexicon::index(pos)];
    while (index.next(line)) {
      if (is_preamble(line)) continue;
      auto f = split_fields(line);
      if (f.size() < 6) index.fail("truncated index record");
      if (f[1].size() != 1 || f[1][0] != expected) index.fail("part of speech '" + std::string(f[1]) + "' unexpected");
      const auto synset_cnt = index.number<std::size_t>(f[2], 10, "synset count");
      const auto ptr_cnt = index.number<std::size_t>(f[3], 10, "pointer count");
      const std::size_t first = 4 + ptr_cnt + 2;
      if (synset_cnt == 0 || f.size() != first + synset_cnt) index.fail("field count does not match synset count");
      std::vector<SenseId> senses;
      senses.reserve(synset_cnt);
      for (std::size_t i = first; i < f.size(); ++i) {
        SenseId id{pos, index.number<std::uint32_t>(f[i], 10, "synset offset")};
        if (!lex.synsets_.contains(id)) index.fail("sense " + std::string(f[i]) + " not found in data file");
        senses.push_back(id);
      }
      if (!entries.emplace(std::string(f[0]), std::move(senses)).second)
        index.fail("duplicate lemma '" + std::string(f[0]) + "'");
    }
  }

  for (PartOfSpeech pos : {PartOfSpeech::noun, PartOfSpeech::adjective}) {
    LineReader exc(dir / (std::string(file_suffix(pos)) + ".exc"));
    auto& exceptions = lex.exceptions_[Lexicon::index(pos)];
    while (exc.next(line)) {
      auto f = split_fields(line);
      if (f.empty()) continue;
      if (f.size() < 2) exc.fail("exception entry without a base form");
      std::vector<std::string> bases;
      for (std::size_t i = 1; i < f.size(); ++i)
        if (lex.contains(f[i], pos)) bases.emplace_back(f[i]);
      if (bases.empty()) continue;
      auto& slot = exceptions[std::string(f[0])];
      for (auto& b : bases)
        if (std::find(slot.begin(), slot.end(), b) == slot.end()) slot.push_back(std::move(b));
    }
  }
  return lex;
}

bool Lexicon::contains(std::string_view lemma, PartOfSpeech pos) const {
  return entries_[index(pos)].find(lemma) != entries_[index(pos)].end();
}

std::span<const SenseId> Lexicon::senses(std::string_view lemma, PartOfSpeech pos) const {
  auto it = entries_[index(pos)].find(lemma);
  if (it == entries_[index(pos)].end()) return {};
  return it->second;
}

std::span<const std::string> Lexicon::exception_bases(std::string_view form, PartOfSpeech pos) const {
  auto it = exceptions_[index(pos)].find(form);
  if (it == exceptions_[index(pos)].end()) return {};
  return it->second;
}

bool Lexicon::are_antonyms(SenseId a, SenseId b) const { return antonyms_.contains(std::minmax(a, b)); }

std::span<const SenseId> Lexicon::antonyms_of(SenseId id) const {
  auto it = antonym_partners_.find(id);
  if (it == antonym_partners_.end()) return {};
  return it->second;
}

std::optional<std::string> lemmatize(std::string_view word, PartOfSpeech pos, const Lexicon& lex) {
  if (word.empty()) return std::nullopt;
  if (auto bases = lex.exception_bases(word, pos); !bases.empty()) return bases.front();
  std::string candidate;
  for (const Rule& rule : rules_for(pos)) {
    if (word.size() <= rule.suffix.size() || !word.ends_with(rule.suffix)) continue;
    candidate.assign(word.substr(0, word.size() - rule.suffix.size()));
    candidate += rule.ending;
    if (lex.contains(candidate, pos)) return candidate;
  }
  if (lex.contains(word, pos)) return std::string(word);
  return std::nullopt;
}

std::optional<Lemma> lemmatize_token(std::string_view token, const Lexicon& lex) {
  for (PartOfSpeech pos : {PartOfSpeech::noun, PartOfSpeech::adjective})
    if (auto lemma = lemmatize(token, pos, lex)) return Lemma{std::move(*lemma), pos};
  return std::nullopt;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("stopword file missing or unreadable: " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    for (Token& t : tokenize(line)) words.insert(std::move(t.surface));
  }
  return words;
}

TermDictionary::TermDictionary(std::vector<std::string> terms, std::vector<TermInfo> info)
    : terms_(std::move(terms)), info_(std::move(info)) {
  if (terms_.size() != info_.size()) throw ValidationError("term dictionary: terms and metadata differ in length");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].empty()) throw ValidationError("term dictionary: empty term at position " + std::to_string(i));
    if (!index_.emplace(terms_[i], i).second)
      throw ValidationError("term dictionary: duplicate term '" + terms_[i] + "'");
  }
}

std::optional<std::size_t> TermDictionary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TermDictionary build_dictionary(std::span<const Review> corpus, const Lexicon& lex, const StopwordSet& stopwords,
                                unsigned threads) {
  // Distinct lemmas per document; noun readings are flagged so the term keeps its noun tag
  // whenever any token produced one.
  std::vector<std::vector<Lemma>> per_doc(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      std::vector<Lemma> lemmas;
      for (const Token& token : tokenize(corpus[d].text)) {
        if (stopwords.contains(token.surface)) continue;
        if (auto lemma = lemmatize_token(token.surface, lex)) lemmas.push_back(std::move(*lemma));
      }
      std::sort(lemmas.begin(), lemmas.end(), [](const Lemma& a, const Lemma& b) {
        return std::tie(a.text, a.pos) < std::tie(b.text, b.pos);
      });
      lemmas.erase(std::unique(lemmas.begin(), lemmas.end()), lemmas.end());
      per_doc[d] = std::move(lemmas);
    }
  });

  struct Candidate {
    std::size_t df = 0;
    bool noun = false;
  };
  std::map<std::string, Candidate> candidates;
  for (const auto& lemmas : per_doc) {
    const std::string* previous = nullptr;
    for (const Lemma& l : lemmas) {
      Candidate& c = candidates[l.text];
      if (previous == nullptr || *previous != l.text) ++c.df;
      c.noun = c.noun || l.pos == PartOfSpeech::noun;
      previous = &l.text;
    }
  }

  std::vector<std::pair<std::string, Candidate>> ranked(candidates.begin(), candidates.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second.df > b.second.df; });

  std::unordered_set<SenseId, SenseIdHash> admitted_senses;
  std::vector<std::string> terms;
  std::vector<TermInfo> info;
  for (auto& [lemma, cand] : ranked) {
    if (stopwords.contains(lemma)) continue;
    const PartOfSpeech pos = cand.noun ? PartOfSpeech::noun : PartOfSpeech::adjective;
    auto senses = lex.senses(lemma, pos);
    bool conflict = senses.empty();
    for (SenseId s : senses) {
      if (admitted_senses.contains(s)) conflict = true;
      for (SenseId other : lex.antonyms_of(s))
        if (admitted_senses.contains(other)) conflict = true;
    }
    if (conflict) continue;
    admitted_senses.insert(senses.begin(), senses.end());
    terms.push_back(std::move(lemma));
    info.push_back({pos, cand.df});
  }
  if (terms.empty()) throw EmptyDictionaryError("no noun or adjective terms found in the corpus");
  return TermDictionary(std::move(terms), std::move(info));
}

void write_dictionary(std::ostream& out, const TermDictionary& dict) {
  out << "term\tpos\tdocument_frequency\n";
  for (std::size_t i = 0; i < dict.size(); ++i)
    out << dict.terms()[i] << '\t' << pos_name(dict.info(i).pos) << '\t' << dict.info(i).document_frequency << '\n';
}

TermDictionary read_dictionary(std::istream& in, std::string_view origin) {
  std::vector<std::string> terms;
  std::vector<TermInfo> info;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "term\tpos\tdocument_frequency") fail("unexpected dictionary header");
      continue;
    }
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) fail("expected three tab-separated fields");
    TermInfo ti;
    try {
      ti.pos = parse_pos_name(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
    } catch (const ParseError& e) {
      fail(e.what());
    }
    std::string_view df = std::string_view(line).substr(t2 + 1);
    auto [ptr, ec] = std::from_chars(df.data(), df.data() + df.size(), ti.document_frequency);
    if (ec != std::errc() || ptr != df.data() + df.size()) fail("bad document frequency");
    terms.push_back(line.substr(0, t1));
    info.push_back(ti);
  }
  if (line_no == 0) throw ParseError(std::string(origin) + ": empty dictionary file");
  return TermDictionary(std::move(terms), std::move(info));
}

}  // namespace lexfa
