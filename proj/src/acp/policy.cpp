#include "sks/acp/policy.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sks/core/errors.hpp"

namespace sks::acp {

namespace {

// ---------------------------------------------------------------- tokenizing

struct Token {
  enum class Kind { open_angle, close_angle, open_paren, close_paren, equals, separator, word, end };
  Kind kind;
  std::string text;
};

bool is_punct(char c) { return c == '<' || c == '>' || c == '(' || c == ')' || c == '='; }

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (is_punct(c)) {
      Token::Kind k = c == '<'   ? Token::Kind::open_angle
                      : c == '>' ? Token::Kind::close_angle
                      : c == '(' ? Token::Kind::open_paren
                      : c == ')' ? Token::Kind::close_paren
                                 : Token::Kind::equals;
      out.push_back({k, std::string(1, c)});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !is_punct(line[j]) && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    std::string word(line.substr(i, j - i));
    out.push_back({word == "::" ? Token::Kind::separator : Token::Kind::word, word});
    i = j;
  }
  out.push_back({Token::Kind::end, ""});
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// ---------------------------------------------------------------- parsing

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, std::size_t line, const Directory& dir)
      : tokens_(std::move(tokens)), line_(line), dir_(dir) {}

  const Token& peek() const { return tokens_[pos_]; }
  Token take() { return tokens_[pos_++]; }
  bool at_end() const { return peek().kind == Token::Kind::end; }

  void expect(Token::Kind k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what + (at_end() ? " at end of line" : " near '" + peek().text + "'"));
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }

  bool peek_keyword(std::string_view kw) const { return peek().kind == Token::Kind::word && peek().text == kw; }

  template <class Atom, class AtomParser>
  Expr<Atom> parse_or(AtomParser& atom) {
    std::vector<Expr<Atom>> parts{parse_and<Atom>(atom)};
    while (peek_keyword("OR")) {
      take();
      parts.push_back(parse_and<Atom>(atom));
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Expr<Atom>::combine(Expr<Atom>::Op::any_of, std::move(parts));
  }

  template <class Atom, class AtomParser>
  Expr<Atom> parse_and(AtomParser& atom) {
    std::vector<Expr<Atom>> parts{parse_unary<Atom>(atom)};
    while (peek_keyword("AND")) {
      take();
      parts.push_back(parse_unary<Atom>(atom));
    }
    if (parts.size() == 1) return std::move(parts.front());
    return Expr<Atom>::combine(Expr<Atom>::Op::all_of, std::move(parts));
  }

  template <class Atom, class AtomParser>
  Expr<Atom> parse_unary(AtomParser& atom) {
    if (peek_keyword("NOT")) {
      take();
      return Expr<Atom>::combine(Expr<Atom>::Op::negate, {parse_unary<Atom>(atom)});
    }
    if (peek().kind == Token::Kind::open_paren) {
      take();
      auto e = parse_or<Atom>(atom);
      expect(Token::Kind::close_paren, "')'");
      return e;
    }
    if (peek().kind != Token::Kind::word) fail("expected an atom" + (at_end() ? std::string() : " near '" + peek().text + "'"));
    std::string key = take().text;
    std::optional<std::string> value;
    if (peek().kind == Token::Kind::equals) {
      take();
      if (peek().kind != Token::Kind::word) fail("expected a value after '" + key + "='");
      value = take().text;
    }
    return Expr<Atom>::leaf(atom(key, value));
  }

  double number(const std::string& text, double lo, double hi) const {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) fail("bad number '" + text + "'");
    if (v < lo || v > hi) fail("value " + text + " out of range");
    return v;
  }

  std::uint32_t hops(const std::string& text) const {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) fail("bad hop count '" + text + "'");
    return v;
  }

  ObjectAtom object_atom(const std::string& key, const std::optional<std::string>& value) {
    const std::string k = lower(key);
    ObjectAtom a;
    if (key == "*" && !value) {
      a.kind = ObjectAtom::Kind::any;
    } else if ((key == "α" || k == "alpha" || k == "label") && value) {
      a.kind = ObjectAtom::Kind::edge_label;
      a.label = *value;
    } else if ((key == "χ" || k == "chi" || k == "weight") && value) {
      a.kind = ObjectAtom::Kind::edge_weight;
      a.weight = number(*value, 0.0, 1.0);
    } else if ((key == "Δ" || k == "delta" || k == "location") && !value) {
      a.kind = ObjectAtom::Kind::location;
    } else {
      fail("unknown data object '" + key + (value ? "=" + *value : std::string()) + "'");
    }
    return a;
  }

  Uid user(const std::string& name) const {
    if (auto it = dir_.users.find(name); it != dir_.users.end()) return it->second;
    if (auto u = Uid::parse(name)) return *u;
    fail("unknown user '" + name + "'");
  }

  PeerId peer(const std::string& name) const {
    if (auto it = dir_.peers.find(name); it != dir_.peers.end()) return it->second;
    if (auto p = PeerId::parse(name)) return *p;
    fail("unknown peer '" + name + "'");
  }

  Place place(const std::string& name) const {
    if (auto it = dir_.places.find(name); it != dir_.places.end()) return it->second;
    // literal lat:lon:radius_m
    std::vector<std::string> parts;
    std::stringstream ss(name);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) fail("unknown place '" + name + "'");
    Place p;
    p.name = name;
    p.center = GeoPoint{number(parts[0], -90, 90), number(parts[1], -180, 180)};
    p.radius_m = number(parts[2], 0, 4.1e7);
    return p;
  }

  SpecAtom spec_atom(const std::string& key, const std::optional<std::string>& value) {
    SpecAtom a;
    if (key == "*" && !value) {
      a.kind = SpecAtom::Kind::any;
      return a;
    }
    if (!value) fail("specification '" + key + "' needs a value");
    const std::string k = lower(key);
    if (key == "ρ" || k == "rho") {
      a.kind = SpecAtom::Kind::social_distance;
      a.hops = hops(*value);
    } else if (key == "γ" || k == "gamma") {
      a.kind = SpecAtom::Kind::edge_label;
      a.text = *value;
    } else if (key == "y") {
      a.kind = SpecAtom::Kind::edge_weight;
      a.weight = number(*value, 0.0, 1.0);
    } else if (key == "B") {
      a.kind = SpecAtom::Kind::originator_user;
      a.user = user(*value);
    } else if (key == "P") {
      a.kind = SpecAtom::Kind::originator_peer;
      a.peer = peer(*value);
    } else if (key == "C") {
      a.kind = SpecAtom::Kind::intermediate_user;
      a.user = user(*value);
    } else if (key == "M") {
      a.kind = SpecAtom::Kind::intermediate_peer;
      a.peer = peer(*value);
    } else if (key == "S") {
      a.kind = SpecAtom::Kind::application;
      a.text = *value;
    } else if (key == "L") {
      a.kind = SpecAtom::Kind::originator_location;
      a.place = place(*value);
    } else {
      fail("unknown specification '" + key + "'");
    }
    return a;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
  const Directory& dir_;
};

template <class Atom, class F>
void for_each_atom(const Expr<Atom>& e, F&& f) {
  if (e.op == Expr<Atom>::Op::atom) f(e.atom);
  for (const auto& c : e.children) for_each_atom(c, f);
}

void flatten_blacklist(const SpecExpr& e, std::vector<SpecAtom>& out, std::size_t line) {
  if (e.op == SpecExpr::Op::any_of) {
    for (const auto& c : e.children) flatten_blacklist(c, out, line);
    return;
  }
  if (e.op != SpecExpr::Op::atom) throw ParseError(line, "blacklist entries may only be joined with OR");
  switch (e.atom.kind) {
    case SpecAtom::Kind::originator_user:
    case SpecAtom::Kind::originator_peer:
    case SpecAtom::Kind::intermediate_user:
    case SpecAtom::Kind::intermediate_peer:
      out.push_back(e.atom);
      return;
    default:
      throw ParseError(line, "blacklist entries must be B, P, C or M atoms");
  }
}

bool is_separator(std::string_view line) {
  const auto b = line.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return false;
  const auto e = line.find_last_not_of(" \t\r");
  const auto body = line.substr(b, e - b + 1);
  return body.size() >= 3 && body.find_first_not_of('-') == std::string_view::npos;
}

// ---------------------------------------------------------------- printing

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string print_atom(const ObjectAtom& a, const Directory&) {
  switch (a.kind) {
    case ObjectAtom::Kind::edge_label: return "α=" + a.label;
    case ObjectAtom::Kind::edge_weight: return "χ=" + format_number(a.weight);
    case ObjectAtom::Kind::location: return "Δ";
    case ObjectAtom::Kind::any: return "*";
  }
  return "?";
}

std::string print_atom(const SpecAtom& a, const Directory& dir) {
  switch (a.kind) {
    case SpecAtom::Kind::social_distance: return "ρ=" + std::to_string(a.hops);
    case SpecAtom::Kind::edge_label: return "γ=" + a.text;
    case SpecAtom::Kind::edge_weight: return "y=" + format_number(a.weight);
    case SpecAtom::Kind::originator_user: return "B=" + dir.user_name(a.user);
    case SpecAtom::Kind::originator_peer: return "P=" + dir.peer_name(a.peer);
    case SpecAtom::Kind::intermediate_user: return "C=" + dir.user_name(a.user);
    case SpecAtom::Kind::intermediate_peer: return "M=" + dir.peer_name(a.peer);
    case SpecAtom::Kind::application: return "S=" + a.text;
    case SpecAtom::Kind::originator_location: return "L=" + a.place.name;
    case SpecAtom::Kind::any: return "*";
  }
  return "?";
}

template <class Atom>
std::string print(const Expr<Atom>& e, const Directory& dir, int parent_prec) {
  using Op = typename Expr<Atom>::Op;
  switch (e.op) {
    case Op::atom: return print_atom(e.atom, dir);
    case Op::negate: return "NOT " + print(e.children.front(), dir, 3);
    case Op::all_of:
    case Op::any_of: {
      const int prec = e.op == Op::all_of ? 2 : 1;
      std::string s;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) s += e.op == Op::all_of ? " AND " : " OR ";
        s += print(e.children[i], dir, prec + 1);
      }
      // every nested group is parenthesized so the tree shape survives a round trip
      return parent_prec > 0 ? "(" + s + ")" : s;
    }
  }
  return {};
}

// ---------------------------------------------------------------- evaluation

std::optional<double> covers(const ObjectExpr& e, const DataRequest& req) {
  using Op = ObjectExpr::Op;
  switch (e.op) {
    case Op::atom:
      switch (e.atom.kind) {
        case ObjectAtom::Kind::any: return 0.0;
        case ObjectAtom::Kind::location:
          return req.kind == DataRequest::Kind::location ? std::optional<double>(0.0) : std::nullopt;
        case ObjectAtom::Kind::edge_label:
          if (req.kind == DataRequest::Kind::edges && req.label && *req.label == e.atom.label) return 0.0;
          return std::nullopt;
        case ObjectAtom::Kind::edge_weight:
          return req.kind == DataRequest::Kind::edges ? std::optional<double>(e.atom.weight) : std::nullopt;
      }
      return std::nullopt;
    case Op::all_of: {
      double floor = 0.0;
      for (const auto& c : e.children) {
        auto f = covers(c, req);
        if (!f) return std::nullopt;
        floor = std::max(floor, *f);
      }
      return floor;
    }
    case Op::any_of: {
      std::optional<double> best;
      for (const auto& c : e.children)
        if (auto f = covers(c, req)) best = best ? std::min(*best, *f) : *f;
      return best;
    }
    case Op::negate:
      return covers(e.children.front(), req) ? std::nullopt : std::optional<double>(0.0);
  }
  return std::nullopt;
}

bool path_within(const PathConstraint& c, const RequestContext& ctx) {
  if (!c.label && c.min_weight <= 0.0) {
    if (ctx.social_distance) return *ctx.social_distance <= c.max_hops;
    if (!ctx.path_distance) return false;
  }
  if (!ctx.path_distance) return false;
  const auto d = ctx.path_distance(c);
  return d && *d <= c.max_hops;
}

bool is_path_atom(const SpecAtom& a) {
  return a.kind == SpecAtom::Kind::social_distance || a.kind == SpecAtom::Kind::edge_label ||
         a.kind == SpecAtom::Kind::edge_weight;
}

bool satisfied(const SpecAtom& a, const RequestContext& ctx) {
  switch (a.kind) {
    case SpecAtom::Kind::social_distance: return path_within(PathConstraint{a.hops, std::nullopt, 0.0}, ctx);
    case SpecAtom::Kind::edge_label: return path_within(PathConstraint{1, a.text, 0.0}, ctx);
    case SpecAtom::Kind::edge_weight: return path_within(PathConstraint{1, std::nullopt, a.weight}, ctx);
    case SpecAtom::Kind::originator_user: return ctx.originator_user == a.user;
    case SpecAtom::Kind::originator_peer: return ctx.originator_peer == a.peer;
    case SpecAtom::Kind::intermediate_user:
      return std::find(ctx.intermediate_users.begin(), ctx.intermediate_users.end(), a.user) !=
             ctx.intermediate_users.end();
    case SpecAtom::Kind::intermediate_peer:
      return std::find(ctx.intermediate_peers.begin(), ctx.intermediate_peers.end(), a.peer) !=
             ctx.intermediate_peers.end();
    case SpecAtom::Kind::application: return ctx.application == a.text;
    case SpecAtom::Kind::originator_location:
      return ctx.originator_location &&
             great_circle_meters(*ctx.originator_location, a.place.center) <= a.place.radius_m;
    case SpecAtom::Kind::any: return true;
  }
  return false;
}

bool satisfied(const SpecExpr& e, const RequestContext& ctx) {
  using Op = SpecExpr::Op;
  switch (e.op) {
    case Op::atom: return satisfied(e.atom, ctx);
    case Op::negate: return !satisfied(e.children.front(), ctx);
    case Op::any_of:
      return std::any_of(e.children.begin(), e.children.end(), [&](const auto& c) { return satisfied(c, ctx); });
    case Op::all_of: {
      // Sibling distance/label/weight atoms describe one path:
      // "ρ=2 AND γ=Skype AND y=0.2" is two hops over Skype ties of weight >= 0.2.
      PathConstraint path;
      bool has_path = false, has_hops = false;
      for (const auto& c : e.children) {
        if (c.op != Op::atom || !is_path_atom(c.atom)) continue;
        has_path = true;
        const auto& a = c.atom;
        if (a.kind == SpecAtom::Kind::social_distance) {
          path.max_hops = has_hops ? std::min(path.max_hops, a.hops) : a.hops;
          has_hops = true;
        } else if (a.kind == SpecAtom::Kind::edge_label) {
          if (path.label && *path.label != a.text) return false;
          path.label = a.text;
        } else {
          path.min_weight = std::max(path.min_weight, a.weight);
        }
      }
      if (has_path && !path_within(path, ctx)) return false;
      for (const auto& c : e.children) {
        if (c.op == Op::atom && is_path_atom(c.atom)) continue;
        if (!satisfied(c, ctx)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

bool Rule::weight_only() const {
  bool only_weight = true;
  for_each_atom(objects, [&](const ObjectAtom& a) {
    if (a.kind != ObjectAtom::Kind::edge_weight) only_weight = false;
  });
  return only_weight;
}

AccessPolicy AccessPolicy::permissive(Uid owner) {
  AccessPolicy p;
  p.owner = owner;
  p.rules.push_back(Rule{ObjectExpr::leaf(ObjectAtom{}), SpecExpr::leaf(SpecAtom{})});
  return p;
}

std::string Directory::user_name(Uid u) const {
  for (const auto& [name, id] : users)
    if (id == u) return name;
  return u.to_string();
}

std::string Directory::peer_name(PeerId p) const {
  for (const auto& [name, id] : peers)
    if (id == p) return name;
  return p.to_string();
}

AccessPolicy parse_policy(std::string_view text, Uid owner, const Directory& dir) {
  AccessPolicy policy;
  policy.owner = owner;
  bool after_separator = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    if (is_separator(line)) {
      if (after_separator) throw ParseError(line_no, "duplicate separator");
      after_separator = true;
      continue;
    }
    LineParser p(tokenize(line), line_no, dir);
    p.expect(Token::Kind::open_angle, "'<'");
    const bool is_blacklist = p.peek_keyword("blacklist");
    if (is_blacklist) {
      p.take();
      p.expect(Token::Kind::close_angle, "'>'");
    }
    ObjectExpr objects;
    if (!is_blacklist) {
      auto atom = [&](const std::string& k, const std::optional<std::string>& v) { return p.object_atom(k, v); };
      objects = p.parse_or<ObjectAtom>(atom);
      p.expect(Token::Kind::close_angle, "'>'");
    }
    p.expect(Token::Kind::separator, "'::'");
    p.expect(Token::Kind::open_angle, "'<'");
    auto atom = [&](const std::string& k, const std::optional<std::string>& v) { return p.spec_atom(k, v); };
    SpecExpr spec = p.parse_or<SpecAtom>(atom);
    p.expect(Token::Kind::close_angle, "'>'");
    if (!p.at_end()) p.fail("trailing text near '" + p.peek().text + "'");
    if (is_blacklist) {
      flatten_blacklist(spec, policy.blacklist, line_no);
    } else {
      if (after_separator) throw ParseError(line_no, "only blacklist entries may follow the separator");
      policy.rules.push_back(Rule{std::move(objects), std::move(spec)});
    }
  }
  return policy;
}

AccessPolicy parse_policy_file(const std::string& path, Uid owner, const Directory& dir) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open policy file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_policy(ss.str(), owner, dir);
}

std::string to_text(const AccessPolicy& policy, const Directory& dir) {
  std::string out;
  for (const auto& r : policy.rules)
    out += "<" + print(r.objects, dir, 0) + "> :: <" + print(r.spec, dir, 0) + ">\n";
  if (!policy.blacklist.empty()) {
    out += "---\n<blacklist> :: <";
    for (std::size_t i = 0; i < policy.blacklist.size(); ++i) {
      if (i) out += " OR ";
      out += print_atom(policy.blacklist[i], dir);
    }
    out += ">\n";
  }
  return out;
}

bool blacklisted(const AccessPolicy& policy, const RequestContext& ctx) {
  return std::any_of(policy.blacklist.begin(), policy.blacklist.end(),
                     [&](const SpecAtom& a) { return satisfied(a, ctx); });
}

Verdict evaluate(const AccessPolicy& policy, const RequestContext& ctx, const DataRequest& requested) {
  if (blacklisted(policy, ctx)) return Verdict{false, Stage::blacklist, std::nullopt, 0.0};
  if (ctx.originator_user == policy.owner) return Verdict{true, Stage::owner, std::nullopt, 0.0};
  for (const bool weight_stage : {false, true}) {
    for (std::size_t i = 0; i < policy.rules.size(); ++i) {
      const auto& rule = policy.rules[i];
      if (rule.weight_only() != weight_stage) continue;
      const auto floor = covers(rule.objects, requested);
      if (!floor || !satisfied(rule.spec, ctx)) continue;
      return Verdict{true, weight_stage ? Stage::weight_rules : Stage::label_rules, i, *floor};
    }
  }
  return Verdict{false, Stage::no_rule, std::nullopt, 0.0};
}

}  // namespace sks::acp
