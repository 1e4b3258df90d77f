#include "srd/store.hpp"

#include <fstream>
#include <functional>

#include "srd/error.hpp"
#include "srd/io.hpp"

namespace srd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class Row>
using Column = std::pair<const char*, std::function<json(const Row&)>>;

template <class Row>
void write_columns(const fs::path& dir, const std::vector<Row>& rows, const std::vector<Column<Row>>& columns) {
  fs::create_directories(dir);
  for (const auto& [name, get] : columns) {
    std::ofstream out(dir / (std::string(name) + ".col"), std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write column " + (dir / name).string());
    for (const auto& r : rows) out << get(r).dump() << '\n';
    if (!out) throw DataError("error writing column " + (dir / name).string());
  }
}

std::vector<json> read_column(const fs::path& dir, const char* name) {
  const auto path = dir / (std::string(name) + ".col");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing store column " + path.string());
  std::vector<json> values;
  std::string line;
  while (std::getline(in, line)) {
    json v = json::parse(line, nullptr, false);
    if (v.is_discarded()) throw DataError("corrupt store column " + path.string());
    values.push_back(std::move(v));
  }
  return values;
}

} // namespace

void write_store(const fs::path& dir, const CorpusStore& store) {
  fs::path tmp = dir;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  write_columns<Post>(tmp / "posts", store.posts,
                      {{"post_id", [](const Post& p) { return json(p.post_id); }},
                       {"user_id", [](const Post& p) { return json(p.user_id); }},
                       {"kind", [](const Post& p) { return json(to_string(p.kind)); }},
                       {"title", [](const Post& p) { return p.title ? json(*p.title) : json(nullptr); }},
                       {"body", [](const Post& p) { return json(p.body); }},
                       {"subreddit", [](const Post& p) { return json(p.subreddit); }},
                       {"created_utc", [](const Post& p) { return json(p.created_utc); }}});
  write_columns<UserAccount>(tmp / "accounts", store.accounts,
                             {{"user_id", [](const UserAccount& a) { return json(a.user_id); }},
                              {"username", [](const UserAccount& a) { return json(a.username); }},
                              {"created_utc", [](const UserAccount& a) { return json(a.created_utc); }}});
  write_file_atomic(tmp / "manifest.json", store.manifest.dump(2) + "\n");

  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

CorpusStore read_store(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json"))
    throw DataError("no corpus store at " + dir.string() + " (run ingest first)");
  CorpusStore s;
  s.manifest = json::parse(read_file(dir / "manifest.json"), nullptr, false);
  if (s.manifest.is_discarded()) throw DataError("corrupt manifest in " + dir.string());

  const fs::path pd = dir / "posts";
  auto ids = read_column(pd, "post_id");
  auto users = read_column(pd, "user_id");
  auto kinds = read_column(pd, "kind");
  auto titles = read_column(pd, "title");
  auto bodies = read_column(pd, "body");
  auto subs = read_column(pd, "subreddit");
  auto times = read_column(pd, "created_utc");
  const auto n = ids.size();
  for (const auto* col : {&users, &kinds, &titles, &bodies, &subs, &times})
    if (col->size() != n) throw DataError("store post columns have different lengths");
  s.posts.resize(n);
  try {
    for (std::size_t i = 0; i < n; ++i) {
      Post& p = s.posts[i];
      p.post_id = ids[i].get<std::string>();
      p.user_id = users[i].get<std::string>();
      p.kind = kinds[i].get<std::string>() == "submission" ? PostKind::submission : PostKind::comment;
      if (!titles[i].is_null()) p.title = titles[i].get<std::string>();
      p.body = bodies[i].get<std::string>();
      p.subreddit = subs[i].get<std::string>();
      p.created_utc = times[i].get<std::int64_t>();
    }
    const fs::path ad = dir / "accounts";
    auto a_ids = read_column(ad, "user_id");
    auto a_names = read_column(ad, "username");
    auto a_times = read_column(ad, "created_utc");
    if (a_names.size() != a_ids.size() || a_times.size() != a_ids.size())
      throw DataError("store account columns have different lengths");
    for (std::size_t i = 0; i < a_ids.size(); ++i)
      s.accounts.push_back({a_ids[i].get<std::string>(), a_names[i].get<std::string>(), a_times[i].get<std::int64_t>()});
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt store value: ") + e.what());
  }
  return s;
}

} // namespace srd
