#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace srd {

/// Earliest accepted post/sign-up timestamp (mid-2005).
inline constexpr std::int64_t kMinTimestamp = 1119398400;

enum class PostKind { submission, comment };

std::string_view to_string(PostKind kind);

struct Post {
  std::string post_id;
  std::string user_id;
  PostKind kind = PostKind::comment;
  std::optional<std::string> title;  // submissions only
  std::string body;
  std::string subreddit;
  std::int64_t created_utc = 0;

  bool operator==(const Post&) const = default;
};

struct UserAccount {
  std::string user_id;
  std::string username;
  std::int64_t created_utc = 0;

  bool operator==(const UserAccount&) const = default;
};

struct UserStats {
  std::string user_id;
  std::uint64_t n_submissions = 0;
  std::uint64_t n_comments = 0;
  std::int64_t first_post_utc = 0;
  std::int64_t last_post_utc = 0;

  bool operator==(const UserStats&) const = default;
};

/// Maps canonical post fields to the names used by a dump. Each canonical
/// field lists accepted source names, tried in order.
///
/// Required: post_id, user_id, body, subreddit, created_utc. Optional: title,
/// kind. When kind is unmapped or absent from a record, a record carrying a
/// title is a submission and anything else a comment.
struct SchemaMap {
  std::map<std::string, std::vector<std::string>> fields;

  /// Field names as written by serialize_post.
  static SchemaMap canonical();
  /// Pushshift-style names: id, author_id, selftext|body, subreddit, title.
  static SchemaMap pushshift();

  /// Throws ConfigError naming the first missing required field.
  void validate() const;
};

/// Parses one record. Returns nullopt when the record is malformed (missing
/// or mistyped field, bad kind, timestamp before kMinTimestamp, comment with
/// a title, empty id).
std::optional<Post> parse_post_record(const nlohmann::json& record, const SchemaMap& schema);

/// Lazy reader over a line-delimited JSON stream. Malformed lines are counted
/// and skipped; blank lines are ignored.
class PostReader {
 public:
  PostReader(std::istream& in, SchemaMap schema);

  std::optional<Post> next();

  std::size_t skipped() const { return skipped_; }
  std::size_t lines_read() const { return lines_; }

 private:
  std::istream* in_;
  SchemaMap schema_;
  std::string line_;
  std::size_t skipped_ = 0;
  std::size_t lines_ = 0;
};

/// Reads every post of a stream; `skipped` receives the malformed-line count.
std::vector<Post> read_posts(std::istream& in, const SchemaMap& schema, std::size_t* skipped = nullptr);

/// One canonical JSONL line (no trailing newline).
std::string serialize_post(const Post& post);

std::optional<UserAccount> parse_account_record(const nlohmann::json& record);
std::vector<UserAccount> read_accounts(std::istream& in, std::size_t* skipped = nullptr);
std::string serialize_account(const UserAccount& account);

/// Single-pass accumulator behind build_user_stats.
class UserStatsBuilder {
 public:
  void add(const Post& post);
  std::map<std::string, UserStats> take() { return std::move(stats_); }

 private:
  std::map<std::string, UserStats> stats_;
};

std::map<std::string, UserStats> build_user_stats(std::span<const Post> posts);

struct IdMapping {
  std::string kind;  // "post", "user" or "username"
  std::string original;
  std::string token;
};

struct PseudonymizedExport {
  std::vector<Post> posts;
  std::vector<UserAccount> accounts;
  std::vector<IdMapping> id_map;  // sorted by (kind, original)
};

/// Keyed token for one identifier: the first 16 hex chars of
/// HMAC-SHA256(secret, kind ":" id [":" salt]).
std::string pseudonym_token(std::string_view secret, std::string_view kind,
                            std::string_view id, unsigned salt = 0);

/// Replaces post ids, user ids and usernames with keyed tokens. Tokens are
/// unique across all kinds; a collision re-salts the later id (ids are
/// processed in sorted order, so the result is deterministic). Throws
/// ConfigError on an empty secret.
PseudonymizedExport pseudonymize_export(std::span<const Post> posts,
                                        std::span<const UserAccount> accounts,
                                        std::string_view secret);

} // namespace srd
