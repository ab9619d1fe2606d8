#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexfa {

/// One user review. `id` is unique within a corpus and `text` is non-blank.
struct Review {
  std::string id;
  std::string source;
  std::string text;

  bool operator==(const Review&) const = default;
};

/// Lowercased run of letters.
struct Token {
  std::string surface;

  bool operator==(const Token&) const = default;
};

enum class ReviewFormat { jsonl, csv };

/// "jsonl" / "csv"; throws ConfigError otherwise.
ReviewFormat parse_review_format(std::string_view name);

/// Format implied by a file extension (.jsonl/.json/.ndjson or .csv).
ReviewFormat infer_review_format(const std::filesystem::path& path);

/// Parses a whole corpus held in memory. `origin` prefixes error messages.
///
/// JSON lines: one object per non-blank line with string fields id, text and optional source.
/// CSV: RFC 4180 with a header row naming at least the id and text columns.
/// Errors: ParseError (malformed record), SchemaError (missing/mistyped field, blank text),
/// DuplicateIdError. All messages carry the 1-based line number of the offending record.
std::vector<Review> parse_reviews(std::string_view content, ReviewFormat format,
                                  std::string_view origin = "<input>");

/// Reads `path` and parses it; IoError when the file cannot be read.
std::vector<Review> load_reviews(const std::filesystem::path& path, ReviewFormat format);

void write_reviews_jsonl(std::ostream& out, std::span<const Review> reviews);
void write_reviews_csv(std::ostream& out, std::span<const Review> reviews);

/// Unicode-lowercases `text` and splits it on every non-letter code point.
/// Digits, hyphens, apostrophes and invalid UTF-8 bytes are separators.
std::vector<Token> tokenize(std::string_view text);

}  // namespace lexfa
