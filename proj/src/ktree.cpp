#include "ktree/ktree.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "ktree/error.hpp"

namespace ktree {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::invalid_slot: return "invalid-slot";
    case ErrorCode::invalid_trace: return "invalid-trace";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::unknown_label: return "unknown-label";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::empty_sample: return "empty-sample";
    case ErrorCode::root_tracking: return "root-tracking";
  }
  return "error";
}

KTree::KTree(int k) : k_(k) {
  if (k < 1) throw Error(ErrorCode::invalid_parameter, "k must be >= 1, got " + std::to_string(k));
  nodes_.reserve(static_cast<std::size_t>(k));
  CliqueRecord root_clique;
  for (int r = 0; r < k; ++r) {
    NodeRecord rec;
    rec.id = NodeId{static_cast<std::uint32_t>(r)};
    nodes_.push_back(std::move(rec));
    root_clique.members.push_back(NodeId{static_cast<std::uint32_t>(r)});
  }
  cliques_.push_back(std::move(root_clique));
  fenwick_.push_back(0);
  fenwick_push(1);
}

const NodeRecord& KTree::node(NodeId id) const {
  if (!contains(id)) throw Error(ErrorCode::unknown_label, "node index " + std::to_string(id.index));
  return nodes_[id.index];
}

const CliqueRecord& KTree::clique(CliqueId id) const {
  if (id >= cliques_.size()) throw Error(ErrorCode::unknown_label, "clique " + std::to_string(id));
  return cliques_[id];
}

NodeId KTree::root(int r) const {
  if (r < 1 || r > k_) throw Error(ErrorCode::unknown_label, "root 0_" + std::to_string(r));
  return NodeId{static_cast<std::uint32_t>(r - 1)};
}

NodeId KTree::inserted(std::uint32_t j) const {
  if (j < 1 || j > size()) throw Error(ErrorCode::unknown_label, "node " + std::to_string(j));
  return NodeId{static_cast<std::uint32_t>(k_) - 1 + j};
}

std::string KTree::name(NodeId id) const {
  if (is_root(id)) return "0_" + std::to_string(id.index + 1);
  return std::to_string(node(id).label);
}

std::optional<NodeId> KTree::find(std::string_view name) const {
  auto parse = [](std::string_view s) -> std::optional<std::uint32_t> {
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
  };
  if (name.starts_with("0_")) {
    auto r = parse(name.substr(2));
    if (!r || *r < 1 || *r > static_cast<std::uint32_t>(k_)) return std::nullopt;
    return NodeId{*r - 1};
  }
  auto j = parse(name);
  if (!j || *j < 1 || *j > size()) return std::nullopt;
  return NodeId{static_cast<std::uint32_t>(k_) - 1 + *j};
}

std::span<const NodeId> KTree::parents(NodeId id) const {
  const auto& rec = node(id);
  if (!rec.parent_clique) return {};
  return cliques_[*rec.parent_clique].members;
}

std::vector<NodeId> KTree::neighbors(NodeId id) const {
  const auto& rec = node(id);
  std::vector<NodeId> out(rec.out_neighbors.begin(), rec.out_neighbors.end());
  if (is_root(id)) {
    for (int r = 0; r < k_; ++r)
      if (static_cast<std::uint32_t>(r) != id.index) out.push_back(NodeId{static_cast<std::uint32_t>(r)});
  } else {
    auto ps = parents(id);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t KTree::degree(NodeId id) const {
  return out_degree(id) + static_cast<std::size_t>(is_root(id) ? k_ - 1 : k_);
}

std::uint64_t KTree::edge_count() const noexcept {
  const auto kk = static_cast<std::uint64_t>(k_);
  return kk * size() + kk * (kk - 1) / 2;
}

void KTree::fenwick_push(std::uint64_t value) {
  // Appending index i: its range (i - lowbit(i), i] sums value plus the
  // already-present entries in (i - lowbit(i), i - 1].
  const std::size_t i = fenwick_.size();
  const std::size_t low = i & (~i + 1);
  fenwick_.push_back(value + fenwick_prefix(i - 1) - fenwick_prefix(i - low));
}

void KTree::fenwick_add(std::size_t index, std::uint64_t delta) {
  for (std::size_t i = index + 1; i < fenwick_.size(); i += i & (~i + 1)) fenwick_[i] += delta;
}

std::uint64_t KTree::fenwick_prefix(std::size_t count) const {
  std::uint64_t sum = 0;
  for (std::size_t i = count; i > 0; i -= i & (~i + 1)) sum += fenwick_[i];
  return sum;
}

SlotLocation KTree::locate_slot(std::uint64_t slot) const {
  if (slot < 1 || slot > slot_count())
    throw Error(ErrorCode::invalid_slot,
                "slot " + std::to_string(slot) + " outside 1.." + std::to_string(slot_count()));
  // Largest prefix of cliques whose slot total is < slot.
  const std::size_t size = fenwick_.size() - 1;
  std::size_t pos = 0;
  std::uint64_t remaining = slot;
  std::size_t step = 1;
  while (step * 2 <= size) step *= 2;
  for (; step > 0; step /= 2) {
    if (pos + step <= size && fenwick_[pos + step] < remaining) {
      pos += step;
      remaining -= fenwick_[pos];
    }
  }
  return SlotLocation{static_cast<CliqueId>(pos), static_cast<std::size_t>(remaining)};
}

std::uint64_t KTree::slot_index(SlotLocation where) const {
  const auto& c = clique(where.clique);
  if (where.position < 1 || where.position > c.slot_count())
    throw Error(ErrorCode::invalid_slot, "position " + std::to_string(where.position) + " in clique " +
                                             std::to_string(where.clique));
  return fenwick_prefix(where.clique) + where.position;
}

std::uint32_t KTree::insert_at(std::uint64_t slot) { return insert_at(locate_slot(slot)); }

std::uint32_t KTree::insert_at(SlotLocation where) {
  if (where.clique >= cliques_.size() || where.position < 1 ||
      where.position > cliques_[where.clique].slot_count())
    throw Error(ErrorCode::invalid_slot, "no slot at clique " + std::to_string(where.clique) + " position " +
                                             std::to_string(where.position));
  const std::uint32_t label = size() + 1;
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};

  auto& parent = cliques_[where.clique];
  parent.children.insert(parent.children.begin() + static_cast<std::ptrdiff_t>(where.position - 1), label);
  fenwick_add(where.clique, 1);

  NodeRecord rec;
  rec.id = id;
  rec.label = label;
  rec.parent_clique = where.clique;
  nodes_.push_back(std::move(rec));

  // Copy: cliques_ may reallocate below.
  const std::vector<NodeId> members = cliques_[where.clique].members;
  for (NodeId m : members) nodes_[m.index].out_neighbors.push_back(id);

  for (int removed = 0; removed < k_; ++removed) {
    CliqueRecord c;
    c.members.reserve(static_cast<std::size_t>(k_));
    for (int t = 0; t < k_; ++t)
      if (t != removed) c.members.push_back(members[static_cast<std::size_t>(t)]);
    c.members.push_back(id);
    cliques_.push_back(std::move(c));
    fenwick_push(1);
  }
  return label;
}

KTree new_ktree(int k) { return KTree(k); }

std::uint64_t evolve_step(KTree& tree, Rng& rng) {
  const std::uint64_t slot = rng.uniform(1, tree.slot_count());
  tree.insert_at(slot);
  return slot;
}

Evolution evolve(int k, std::uint32_t n, Rng& rng) {
  Evolution out{KTree(k), InsertionTrace{k, {}}};
  out.trace.choices.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.trace.choices.push_back(evolve_step(out.tree, rng));
  return out;
}

Evolution evolve(int k, std::uint32_t n, std::uint64_t seed) {
  Rng rng(seed);
  return evolve(k, n, rng);
}

KTree replay(const InsertionTrace& trace) {
  KTree tree(trace.k);
  for (std::size_t i = 0; i < trace.choices.size(); ++i) {
    const auto s = trace.choices[i];
    if (s < 1 || s > tree.slot_count())
      throw Error(ErrorCode::invalid_trace, "choice " + std::to_string(i + 1) + " = " + std::to_string(s) +
                                                " outside 1.." + std::to_string(tree.slot_count()));
    tree.insert_at(s);
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

void write_list(std::ostringstream& os, const KTree& tree, std::span<const NodeId> ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << tree.name(ids[i]);
}

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_tokens(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

std::uint64_t parse_uint(const Token& tok, std::size_t line, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size())
    throw ParseError(line, tok.column, "expected " + std::string(what) + ", got '" + std::string(tok.text) + "'");
  return v;
}

std::uint64_t parse_keyed(const Token& tok, std::string_view key, std::size_t line) {
  if (!tok.text.starts_with(key))
    throw ParseError(line, tok.column, "expected '" + std::string(key) + "<value>'");
  Token rest{tok.text.substr(key.size()), tok.column + key.size()};
  return parse_uint(rest, line, key);
}

void expect_word(const Token& tok, std::string_view word, std::size_t line) {
  if (tok.text != word)
    throw ParseError(line, tok.column, "expected '" + std::string(word) + "', got '" + std::string(tok.text) + "'");
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  if (s == "-") return out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::string_view>> split_lines(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0, number = 1;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (!split_tokens(line).empty()) out.emplace_back(number, line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
    ++number;
  }
  return out;
}

}  // namespace

std::string serialize(const KTree& tree) {
  std::ostringstream os;
  os << "ktree k=" << tree.k() << " n=" << tree.size() << '\n';
  for (std::uint32_t j = 1; j <= tree.size(); ++j)
    os << "node " << j << " clique " << *tree.node(tree.inserted(j)).parent_clique << '\n';
  const auto cliques = tree.cliques();
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    os << "clique " << c << " members ";
    write_list(os, tree, cliques[c].members);
    os << " children ";
    if (cliques[c].children.empty()) os << '-';
    for (std::size_t i = 0; i < cliques[c].children.size(); ++i) os << (i ? "," : "") << cliques[c].children[i];
    os << '\n';
  }
  return os.str();
}

KTree deserialize(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, 1, "empty document");

  const auto [header_line, header_text] = lines.front();
  const auto header = split_tokens(header_text);
  if (header.size() != 3) throw ParseError(header_line, 1, "header must be 'ktree k=<k> n=<n>'");
  expect_word(header[0], "ktree", header_line);
  const auto k = parse_keyed(header[1], "k=", header_line);
  const auto n = parse_keyed(header[2], "n=", header_line);
  if (k < 1 || k > 1024) throw ParseError(header_line, header[1].column, "k out of range");

  std::map<std::uint64_t, std::pair<std::uint64_t, std::size_t>> node_clique;  // j -> (cid, line)
  struct ParsedClique {
    std::vector<std::string> members;
    std::vector<std::uint32_t> children;
    std::size_t line;
  };
  std::map<std::uint64_t, ParsedClique> cliques;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    const auto toks = split_tokens(line);
    if (toks[0].text == "node") {
      if (toks.size() != 4) throw ParseError(number, 1, "node line must be 'node <j> clique <cid>'");
      const auto j = parse_uint(toks[1], number, "node label");
      expect_word(toks[2], "clique", number);
      const auto cid = parse_uint(toks[3], number, "clique id");
      if (j < 1 || j > n) throw ParseError(number, toks[1].column, "node label outside 1..n");
      if (!node_clique.emplace(j, std::pair{cid, number}).second)
        throw ParseError(number, toks[1].column, "duplicate node " + std::to_string(j));
    } else if (toks[0].text == "clique") {
      if (toks.size() != 6)
        throw ParseError(number, 1, "clique line must be 'clique <cid> members <...> children <...>'");
      const auto cid = parse_uint(toks[1], number, "clique id");
      expect_word(toks[2], "members", number);
      expect_word(toks[4], "children", number);
      ParsedClique pc;
      pc.line = number;
      for (auto m : split_commas(toks[3].text)) pc.members.emplace_back(m);
      for (auto c : split_commas(toks[5].text)) {
        Token t{c, toks[5].column};
        pc.children.push_back(static_cast<std::uint32_t>(parse_uint(t, number, "child label")));
      }
      if (!cliques.emplace(cid, std::move(pc)).second)
        throw ParseError(number, toks[1].column, "duplicate clique " + std::to_string(cid));
    } else {
      throw ParseError(number, toks[0].column, "unknown record '" + std::string(toks[0].text) + "'");
    }
  }

  const std::size_t last_line = lines.back().first;
  if (node_clique.size() != n) throw ParseError(last_line, 1, "expected " + std::to_string(n) + " node records");
  if (cliques.size() != 1 + k * n)
    throw ParseError(last_line, 1, "expected " + std::to_string(1 + k * n) + " clique records");

  // Rebuild by insertion: node j goes to its clique at the position it holds
  // among the clique's children with labels <= j.
  KTree tree(static_cast<int>(k));
  for (std::uint32_t j = 1; j <= n; ++j) {
    const auto [cid, number] = node_clique.at(j);
    auto it = cliques.find(cid);
    if (it == cliques.end() || cid >= tree.cliques().size())
      throw ParseError(number, 1, "node " + std::to_string(j) + " attaches to a clique that does not exist yet");
    const auto& kids = it->second.children;
    auto self = std::find(kids.begin(), kids.end(), j);
    if (self == kids.end())
      throw ParseError(it->second.line, 1, "clique " + std::to_string(cid) + " does not list child " +
                                               std::to_string(j));
    const auto earlier = std::count_if(kids.begin(), self, [j](std::uint32_t c) { return c < j; });
    tree.insert_at(SlotLocation{static_cast<CliqueId>(cid), static_cast<std::size_t>(earlier) + 1});
  }

  for (const auto& [cid, pc] : cliques) {
    if (cid >= tree.cliques().size()) throw ParseError(pc.line, 1, "clique id out of range");
    const auto& built = tree.clique(static_cast<CliqueId>(cid));
    bool same = built.children == pc.children && built.members.size() == pc.members.size();
    for (std::size_t i = 0; same && i < pc.members.size(); ++i) same = tree.name(built.members[i]) == pc.members[i];
    if (!same) throw ParseError(pc.line, 1, "clique " + std::to_string(cid) + " inconsistent with node records");
  }
  return tree;
}

std::string serialize_trace(const InsertionTrace& trace) {
  std::ostringstream os;
  os << "trace k=" << trace.k << '\n';
  for (std::size_t i = 0; i < trace.choices.size(); ++i) os << (i ? " " : "") << trace.choices[i];
  if (!trace.choices.empty()) os << '\n';
  return os.str();
}

InsertionTrace deserialize_trace(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError(1, 1, "empty document");
  const auto [header_line, header_text] = lines.front();
  const auto header = split_tokens(header_text);
  if (header.size() != 2) throw ParseError(header_line, 1, "header must be 'trace k=<k>'");
  expect_word(header[0], "trace", header_line);
  InsertionTrace trace;
  trace.k = static_cast<int>(parse_keyed(header[1], "k=", header_line));
  if (trace.k < 1) throw ParseError(header_line, header[1].column, "k must be >= 1");
  for (std::size_t li = 1; li < lines.size(); ++li) {
    for (const auto& tok : split_tokens(lines[li].second)) {
      const auto s = parse_uint(tok, lines[li].first, "slot choice");
      const auto bound = 1 + static_cast<std::uint64_t>(trace.k + 1) * trace.choices.size();
      if (s < 1 || s > bound)
        throw ParseError(lines[li].first, tok.column, "choice " + std::to_string(s) + " outside 1.." +
                                                          std::to_string(bound));
      trace.choices.push_back(s);
    }
  }
  return trace;
}

}  // namespace ktree
