#include "lexfa/ingest.hpp"

#include <cctype>
#include <clocale>
#include <cwctype>
#include <fstream>
#include <locale.h>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>
#include <wctype.h>

#include "json.hpp"
#include "lexfa/error.hpp"

namespace lexfa {

namespace {

using nlohmann::json;

std::string at_line(std::string_view origin, std::size_t line) {
  return std::string(origin) + ":" + std::to_string(line) + ": ";
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(std::string_view origin) : origin_(origin) {}

  void add(Review review, std::size_t line) {
    if (review.id.empty()) throw SchemaError(at_line(origin_, line) + "review id is empty");
    for (char c : review.id)
      if (c == '\n' || c == '\r' || c == '\t')
        throw SchemaError(at_line(origin_, line) + "review id contains a control character");
    if (is_blank(review.text)) throw SchemaError(at_line(origin_, line) + "review text is blank");
    if (!seen_.insert(review.id).second)
      throw DuplicateIdError(at_line(origin_, line) + "duplicate review id '" + review.id + "'");
    reviews_.push_back(std::move(review));
  }

  std::vector<Review> take() { return std::move(reviews_); }

 private:
  std::string_view origin_;
  std::unordered_set<std::string> seen_;
  std::vector<Review> reviews_;
};

std::vector<Review> parse_jsonl(std::string_view content, std::string_view origin) {
  CorpusBuilder corpus(origin);
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (is_blank(line)) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(at_line(origin, line_no) + "malformed JSON record (" + e.what() + ")");
    }
    if (!record.is_object()) throw SchemaError(at_line(origin, line_no) + "record is not a JSON object");

    auto field = [&](const char* name, bool required) -> std::string {
      auto it = record.find(name);
      if (it == record.end()) {
        if (required) throw SchemaError(at_line(origin, line_no) + "missing field '" + name + "'");
        return {};
      }
      if (!it->is_string()) throw SchemaError(at_line(origin, line_no) + "field '" + name + "' is not a string");
      return it->get<std::string>();
    };
    Review r;
    r.id = field("id", true);
    r.source = field("source", false);
    r.text = field("text", true);
    corpus.add(std::move(r), line_no);
  }
  return corpus.take();
}

// RFC 4180 record reader. Returns nullopt at end of input.
class CsvReader {
 public:
  CsvReader(std::string_view content, std::string_view origin) : in_(content), origin_(origin) {}

  std::size_t record_line() const { return record_line_; }

  std::optional<std::vector<std::string>> next() {
    if (pos_ >= in_.size()) return std::nullopt;
    record_line_ = line_;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false, after_quote = false;
    while (pos_ < in_.size()) {
      char c = in_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < in_.size() && in_[pos_] == '"') {
            field += '"';
            ++pos_;
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') ++line_;
          field += c;
        }
        continue;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (c == '\r' && pos_ < in_.size() && in_[pos_] == '\n') {
        continue;
      } else if (c == '\n') {
        ++line_;
        fields.push_back(std::move(field));
        return fields;
      } else if (c == '"') {
        if (!field.empty() || after_quote)
          throw ParseError(at_line(origin_, line_) + "unexpected quote inside unquoted field");
        quoted = true;
      } else {
        if (after_quote) throw ParseError(at_line(origin_, line_) + "characters after closing quote");
        field += c;
      }
    }
    if (quoted) throw ParseError(at_line(origin_, record_line_) + "unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
  }

 private:
  std::string_view in_;
  std::string_view origin_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

std::vector<Review> parse_csv(std::string_view content, std::string_view origin) {
  CorpusBuilder corpus(origin);
  CsvReader reader(content, origin);
  auto header = reader.next();
  if (!header) return {};
  std::optional<std::size_t> id_col, source_col, text_col;
  for (std::size_t i = 0; i < header->size(); ++i) {
    std::string name = (*header)[i];
    if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.erase(0, 3);
    if (name == "id") id_col = i;
    if (name == "source") source_col = i;
    if (name == "text") text_col = i;
  }
  if (!id_col) throw SchemaError(at_line(origin, 1) + "CSV header lacks an 'id' column");
  if (!text_col) throw SchemaError(at_line(origin, 1) + "CSV header lacks a 'text' column");

  while (auto row = reader.next()) {
    const std::size_t line = reader.record_line();
    if (row->size() == 1 && is_blank((*row)[0])) continue;
    if (row->size() != header->size())
      throw ParseError(at_line(origin, line) + "expected " + std::to_string(header->size()) + " fields, found " +
                       std::to_string(row->size()));
    Review r;
    r.id = (*row)[*id_col];
    if (source_col) r.source = (*row)[*source_col];
    r.text = (*row)[*text_col];
    corpus.add(std::move(r), line);
  }
  return corpus.take();
}

void write_csv_field(std::ostream& out, const std::string& value) {
  if (value.find_first_of(",\"\r\n") == std::string::npos) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

// UTF-8 decoding. Returns the code point and advances `pos`; invalid sequences yield nullopt
// and advance by one byte.
std::optional<char32_t> decode_utf8(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return std::nullopt;
  }
  if (pos + len > s.size()) {
    ++pos;
    return std::nullopt;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return std::nullopt;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return std::nullopt;
  }
  pos += len;
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Character classification comes from the C.UTF-8 locale object, independent of the
// process-wide locale. Without it only ASCII letters count.
locale_t unicode_ctype() {
  static const locale_t loc = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr));
  return loc;
}

bool is_letter(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  locale_t loc = unicode_ctype();
  return loc != nullptr && iswalpha_l(static_cast<wint_t>(cp), loc);
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  locale_t loc = unicode_ctype();
  return loc == nullptr ? cp : static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

}  // namespace

ReviewFormat parse_review_format(std::string_view name) {
  if (name == "jsonl") return ReviewFormat::jsonl;
  if (name == "csv") return ReviewFormat::csv;
  throw ConfigError("unknown review format '" + std::string(name) + "' (expected jsonl or csv)");
}

ReviewFormat infer_review_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".csv") return ReviewFormat::csv;
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return ReviewFormat::jsonl;
  throw ConfigError("cannot infer review format from '" + path.string() + "'; pass --format");
}

std::vector<Review> parse_reviews(std::string_view content, ReviewFormat format, std::string_view origin) {
  return format == ReviewFormat::jsonl ? parse_jsonl(content, origin) : parse_csv(content, origin);
}

std::vector<Review> load_reviews(const std::filesystem::path& path, ReviewFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open review file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return parse_reviews(buf.str(), format, path.string());
}

void write_reviews_jsonl(std::ostream& out, std::span<const Review> reviews) {
  for (const Review& r : reviews) {
    json j = {{"id", r.id}, {"source", r.source}, {"text", r.text}};
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

void write_reviews_csv(std::ostream& out, std::span<const Review> reviews) {
  out << "id,source,text\r\n";
  for (const Review& r : reviews) {
    write_csv_field(out, r.id);
    out << ',';
    write_csv_field(out, r.source);
    out << ',';
    write_csv_field(out, r.text);
    out << "\r\n";
  }
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = decode_utf8(text, pos);
    if (cp && is_letter(*cp)) {
      encode_utf8(to_lower(*cp), current);
    } else if (!current.empty()) {
      tokens.push_back(Token{std::move(current)});
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(Token{std::move(current)});
  return tokens;
}

}  // namespace lexfa
