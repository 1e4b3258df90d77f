#include "srd/corpus.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <unordered_map>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "srd/error.hpp"
#include "srd/text.hpp"

namespace srd {

using nlohmann::json;

std::string_view to_string(PostKind kind) {
  return kind == PostKind::submission ? "submission" : "comment";
}

SchemaMap SchemaMap::canonical() {
  SchemaMap m;
  for (const char* f : {"post_id", "user_id", "kind", "title", "body", "subreddit", "created_utc"})
    m.fields[f] = {f};
  return m;
}

SchemaMap SchemaMap::pushshift() {
  SchemaMap m;
  m.fields["post_id"] = {"id"};
  m.fields["user_id"] = {"author_id", "author_fullname"};
  m.fields["title"] = {"title"};
  m.fields["body"] = {"selftext", "body"};
  m.fields["subreddit"] = {"subreddit"};
  m.fields["created_utc"] = {"created_utc"};
  return m;
}

void SchemaMap::validate() const {
  for (const char* f : {"post_id", "user_id", "body", "subreddit", "created_utc"}) {
    auto it = fields.find(f);
    if (it == fields.end() || it->second.empty())
      throw ConfigError(std::string("schema map is missing required field '") + f + "'");
  }
}

namespace {

const json* lookup(const json& record, const SchemaMap& schema, const char* field) {
  auto it = schema.fields.find(field);
  if (it == schema.fields.end()) return nullptr;
  for (const auto& name : it->second) {
    auto v = record.find(name);
    if (v != record.end() && !v->is_null()) return &*v;
  }
  return nullptr;
}

std::optional<std::string> string_field(const json* v) {
  if (v == nullptr || !v->is_string()) return std::nullopt;
  return v->get<std::string>();
}

std::optional<std::int64_t> timestamp_field(const json* v) {
  if (v == nullptr) return std::nullopt;
  if (v->is_number_integer()) return v->get<std::int64_t>();
  if (v->is_number_float()) {
    const double d = v->get<double>();
    if (d != static_cast<double>(static_cast<std::int64_t>(d))) return std::nullopt;
    return static_cast<std::int64_t>(d);
  }
  if (v->is_string()) {
    const auto& s = v->get_ref<const std::string&>();
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

} // namespace

std::optional<Post> parse_post_record(const json& record, const SchemaMap& schema) {
  if (!record.is_object()) return std::nullopt;
  Post p;
  auto id = string_field(lookup(record, schema, "post_id"));
  auto user = string_field(lookup(record, schema, "user_id"));
  auto body = string_field(lookup(record, schema, "body"));
  auto sub = string_field(lookup(record, schema, "subreddit"));
  auto ts = timestamp_field(lookup(record, schema, "created_utc"));
  if (!id || id->empty() || !user || user->empty() || !body || !sub || !ts) return std::nullopt;
  if (*ts < kMinTimestamp) return std::nullopt;

  const json* title = lookup(record, schema, "title");
  if (title != nullptr && !title->is_string()) return std::nullopt;
  if (const json* kind = lookup(record, schema, "kind")) {
    if (!kind->is_string()) return std::nullopt;
    const auto& k = kind->get_ref<const std::string&>();
    if (k == "submission")
      p.kind = PostKind::submission;
    else if (k == "comment")
      p.kind = PostKind::comment;
    else
      return std::nullopt;
  } else {
    p.kind = title != nullptr ? PostKind::submission : PostKind::comment;
  }
  if (title != nullptr) {
    if (p.kind == PostKind::comment) return std::nullopt;
    p.title = title->get<std::string>();
  }
  p.post_id = std::move(*id);
  p.user_id = std::move(*user);
  p.body = std::move(*body);
  p.subreddit = std::move(*sub);
  p.created_utc = *ts;
  return p;
}

PostReader::PostReader(std::istream& in, SchemaMap schema) : in_(&in), schema_(std::move(schema)) {
  schema_.validate();
}

std::optional<Post> PostReader::next() {
  while (std::getline(*in_, line_)) {
    ++lines_;
    if (trim(line_).empty()) continue;
    json record = json::parse(line_, nullptr, false);
    if (record.is_discarded()) {
      ++skipped_;
      continue;
    }
    if (auto post = parse_post_record(record, schema_)) return post;
    ++skipped_;
  }
  if (in_->bad()) throw DataError("error while reading post stream");
  return std::nullopt;
}

std::vector<Post> read_posts(std::istream& in, const SchemaMap& schema, std::size_t* skipped) {
  PostReader reader(in, schema);
  std::vector<Post> posts;
  while (auto p = reader.next()) posts.push_back(std::move(*p));
  if (skipped) *skipped = reader.skipped();
  return posts;
}

std::string serialize_post(const Post& post) {
  json j = json::object();
  j["post_id"] = post.post_id;
  j["user_id"] = post.user_id;
  j["kind"] = to_string(post.kind);
  j["title"] = post.title ? json(*post.title) : json(nullptr);
  j["body"] = post.body;
  j["subreddit"] = post.subreddit;
  j["created_utc"] = post.created_utc;
  return j.dump();
}

std::optional<UserAccount> parse_account_record(const json& record) {
  if (!record.is_object()) return std::nullopt;
  auto get = [&](const char* k) -> const json* {
    auto it = record.find(k);
    return it == record.end() ? nullptr : &*it;
  };
  auto id = string_field(get("user_id"));
  auto name = string_field(get("username"));
  auto ts = timestamp_field(get("created_utc"));
  if (!id || id->empty() || !name || name->empty() || !ts || *ts < kMinTimestamp) return std::nullopt;
  return UserAccount{std::move(*id), std::move(*name), *ts};
}

std::vector<UserAccount> read_accounts(std::istream& in, std::size_t* skipped) {
  std::vector<UserAccount> out;
  std::size_t bad = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json record = json::parse(line, nullptr, false);
    std::optional<UserAccount> acc;
    if (!record.is_discarded()) acc = parse_account_record(record);
    if (acc)
      out.push_back(std::move(*acc));
    else
      ++bad;
  }
  if (in.bad()) throw DataError("error while reading account stream");
  if (skipped) *skipped = bad;
  return out;
}

std::string serialize_account(const UserAccount& account) {
  json j = json::object();
  j["user_id"] = account.user_id;
  j["username"] = account.username;
  j["created_utc"] = account.created_utc;
  return j.dump();
}

void UserStatsBuilder::add(const Post& post) {
  auto [it, fresh] = stats_.try_emplace(post.user_id);
  UserStats& s = it->second;
  if (fresh) {
    s.user_id = post.user_id;
    s.first_post_utc = s.last_post_utc = post.created_utc;
  } else {
    s.first_post_utc = std::min(s.first_post_utc, post.created_utc);
    s.last_post_utc = std::max(s.last_post_utc, post.created_utc);
  }
  if (post.kind == PostKind::submission)
    ++s.n_submissions;
  else
    ++s.n_comments;
}

std::map<std::string, UserStats> build_user_stats(std::span<const Post> posts) {
  UserStatsBuilder b;
  for (const auto& p : posts) b.add(p);
  return b.take();
}

std::string pseudonym_token(std::string_view secret, std::string_view kind,
                            std::string_view id, unsigned salt) {
  std::string msg;
  msg.reserve(kind.size() + id.size() + 12);
  msg.append(kind).push_back(':');
  msg.append(id);
  if (salt != 0) msg.append(":").append(std::to_string(salt));

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
       reinterpret_cast<const unsigned char*>(msg.data()), msg.size(), digest, &len);
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (std::size_t i = 0; i < 8; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xF];
  }
  return out;
}

PseudonymizedExport pseudonymize_export(std::span<const Post> posts,
                                        std::span<const UserAccount> accounts,
                                        std::string_view secret) {
  if (secret.empty()) throw ConfigError("pseudonymization secret must not be empty");

  std::set<std::string> post_ids, user_ids, usernames;
  for (const auto& p : posts) {
    post_ids.insert(p.post_id);
    user_ids.insert(p.user_id);
  }
  for (const auto& a : accounts) {
    user_ids.insert(a.user_id);
    usernames.insert(a.username);
  }

  PseudonymizedExport out;
  std::unordered_map<std::string, std::string> used;  // token -> owner
  std::map<std::string, std::string> post_tok, user_tok, name_tok;
  auto assign = [&](const char* kind, const std::set<std::string>& ids,
                    std::map<std::string, std::string>& dest) {
    for (const auto& id : ids) {
      const std::string owner = std::string(kind) + ":" + id;
      for (unsigned salt = 0;; ++salt) {
        std::string tok = pseudonym_token(secret, kind, id, salt);
        auto [it, fresh] = used.try_emplace(tok, owner);
        if (fresh) {
          dest[id] = tok;
          out.id_map.push_back({kind, id, std::move(tok)});
          break;
        }
      }
    }
  };
  assign("post", post_ids, post_tok);
  assign("user", user_ids, user_tok);
  assign("username", usernames, name_tok);

  out.posts.reserve(posts.size());
  for (const auto& p : posts) {
    Post q = p;
    q.post_id = post_tok.at(p.post_id);
    q.user_id = user_tok.at(p.user_id);
    out.posts.push_back(std::move(q));
  }
  out.accounts.reserve(accounts.size());
  for (const auto& a : accounts)
    out.accounts.push_back({user_tok.at(a.user_id), name_tok.at(a.username), a.created_utc});
  return out;
}

} // namespace srd
