#pragma once

// Command-line front end. Exit codes: 0 true / produced, 1 false,
// 2 inconclusive (a bound was hit), 64 usage or parse error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bf_engine.hpp"
#include "finite_oracle.hpp"
#include "formula.hpp"
#include "parser.hpp"
#include "scott.hpp"

namespace bfscott::cli {

inline constexpr int kTrue = 0;
inline constexpr int kFalse = 1;
inline constexpr int kInconclusive = 2;
inline constexpr int kUsage = 64;

inline constexpr const char* kSchema = "bfscott/1";

using nlohmann::json;

namespace detail {

inline json to_json(const SymbolicCertificate& c) {
  json j{{"left", to_string(c.query.left)},
         {"right", to_string(c.query.right)},
         {"rank", c.query.rank},
         {"holds", c.holds}};
  if (c.refutation) j["refutation"] = to_string(*c.refutation);
  json replies = json::array();
  for (const auto& r : c.replies) {
    json kids = json::array();
    for (const auto& k : r.children) kids.push_back(to_json(k));
    replies.push_back({{"forall", to_string(r.forall_move)}, {"exists", to_string(r.exists_move)}, {"children", kids}});
  }
  j["replies"] = replies;
  return j;
}

inline json to_json(const OracleCertificate& c) {
  json j{{"left", to_string(c.query.pair.left.colors)},
         {"left_tuple", c.query.pair.left_tuple},
         {"right", to_string(c.query.pair.right.colors)},
         {"right_tuple", c.query.pair.right_tuple},
         {"rank", c.query.rank},
         {"holds", c.holds}};
  if (c.refutation) j["refutation"] = *c.refutation;
  json replies = json::array();
  for (const auto& r : c.replies) {
    json kids = json::array();
    for (const auto& k : r.children) kids.push_back(to_json(k));
    replies.push_back({{"forall", r.forall_move}, {"exists", r.exists_move}, {"children", kids}});
  }
  j["replies"] = replies;
  return j;
}

inline std::string show_cut(const CutDescriptor& d) { return "<" + to_string(d) + ">"; }

inline std::string show_tuple(const Tuple& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + "]";
}

inline void print_tree(std::ostream& out, const SymbolicCertificate& c, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  out << pad << (c.holds ? "holds " : "fails ") << "[" << to_string(c.query.left) << "] <=_" << c.query.rank << " ["
      << to_string(c.query.right) << "]\n";
  if (c.refutation) out << pad << "  refutation " << show_cut(*c.refutation) << "\n";
  for (const auto& r : c.replies) {
    out << pad << "  forall " << show_cut(r.forall_move) << " -> exists " << show_cut(r.exists_move) << "\n";
    for (const auto& k : r.children) print_tree(out, k, depth + 2);
  }
}

inline void print_tree(std::ostream& out, const OracleCertificate& c, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const auto& p = c.query.pair;
  out << pad << (c.holds ? "holds " : "fails ") << to_string(p.left.colors) << show_tuple(p.left_tuple) << " <=_"
      << c.query.rank << " " << to_string(p.right.colors) << show_tuple(p.right_tuple) << "\n";
  if (c.refutation) out << pad << "  refutation " << show_tuple(*c.refutation) << "\n";
  for (const auto& r : c.replies) {
    out << pad << "  forall " << show_tuple(r.forall_move) << " -> exists " << show_tuple(r.exists_move) << "\n";
    for (const auto& k : r.children) print_tree(out, k, depth + 2);
  }
}

inline int exit_for(const Outcome& o) {
  return o.is_true() ? kTrue : o.is_false() ? kFalse : kInconclusive;
}

inline std::string opt_str(const std::optional<unsigned>& v) { return v ? std::to_string(*v) : "unknown"; }

inline json opt_json(const std::optional<unsigned>& v) { return v ? json(*v) : json("unknown"); }

inline json report_json(const RankReport& r) {
  json j{{"sr_lower", r.sr_lower},
         {"sr_upper", opt_json(r.sr_upper)},
         {"srp_lower", r.srp_lower},
         {"srp_upper", opt_json(r.srp_upper)},
         {"bounds", {{"n_max", r.bounds.n_max}, {"tuple_len", r.bounds.tuple_len}, {"param_len", r.bounds.param_len}}}};
  if (r.witness) {
    j["witness"] = {{"left", to_string(r.witness->left)}, {"right", to_string(r.witness->right)}, {"rank", r.witness->rank}};
    if (r.witness->parameter) j["witness"]["parameter"] = to_string(*r.witness->parameter);
  }
  if (r.best_parameter) j["parameter"] = to_string(*r.best_parameter);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

inline void report_text(std::ostream& out, const RankReport& r) {
  out << "SR   in [" << r.sr_lower << ", " << opt_str(r.sr_upper) << "]\n";
  out << "SR_p in [" << r.srp_lower << ", " << opt_str(r.srp_upper) << "]";
  if (r.best_parameter) out << " with parameter " << show_cut(*r.best_parameter);
  out << "\n";
  if (r.witness) {
    out << "witness: " << show_cut(r.witness->left) << " <=_" << r.witness->rank << " " << show_cut(r.witness->right)
        << " but not automorphic";
    if (r.witness->parameter) out << " over " << show_cut(*r.witness->parameter);
    out << "\n";
  }
  out << "bounds: n_max=" << r.bounds.n_max << " tuple_len=" << r.bounds.tuple_len
      << " param_len=" << r.bounds.param_len << " (ranks are certified only over these canonical tuples)\n";
  for (const auto& n : r.notes) out << "inconclusive: " << n << "\n";
}

// Splits a batch line into words; double quotes group, "" is an empty word.
inline std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, have = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      have = true;
    } else if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
      if (have) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (quoted) throw ParseError("unterminated quote", line.size());
  if (have) out.push_back(cur);
  return out;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Back-and-forth relations and Scott analysis for colored linear orders", "bfscott"};
  app.require_subcommand(1);
  app.fallthrough();

  bool as_json = false, stats = false;
  EngineOptions eo;
  app.add_flag("--json", as_json, "structured output");
  app.add_flag("--stats", stats, "print memo statistics");
  app.add_option("--block-factor", eo.block_factor, "B(n) = factor * |colors of block| * n")->capture_default_str();
  app.add_option("--horizon-mult", eo.horizon_mult, "H(n) = |prefix| + |period| * mult * 2^n")->capture_default_str();

  unsigned rank = 1;
  std::string left, right, left_cut, right_cut;
  bool want_cert = false;
  RankBounds bounds;

  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("-n,--rank", rank, "rank n")->capture_default_str();
    sub->add_option("left", left, "left expression")->required();
    sub->add_option("right", right, "right expression")->required();
    sub->add_option("--left-cut", left_cut, "cut descriptor on the left expression");
    sub->add_option("--right-cut", right_cut, "cut descriptor on the right expression");
  };

  auto* leq = app.add_subcommand("leq", "decide left <=_n right");
  add_pair(leq);
  leq->add_flag("--certificate", want_cert, "print a strategy or refutation tree");
  auto* equiv = app.add_subcommand("equiv", "decide left ==_n right");
  add_pair(equiv);

  std::string subject;
  auto* classes = app.add_subcommand("classes", "==_n classes of single elements");
  classes->add_option("-n,--rank", rank)->capture_default_str();
  classes->add_option("expr", subject)->required();

  auto add_bounds = [&](CLI::App* sub) {
    sub->add_option("expr", subject)->required();
    sub->add_option("--n-max", bounds.n_max, "largest rank searched")->capture_default_str();
    sub->add_option("--tuple-len", bounds.tuple_len, "longest canonical tuple")->capture_default_str();
    sub->add_option("--param-len", bounds.param_len, "longest parameter tuple")->capture_default_str();
  };
  auto* rank_cmd = app.add_subcommand("rank", "Scott rank bounds");
  add_bounds(rank_cmd);
  auto* complexity = app.add_subcommand("complexity", "Scott sentence complexity");
  add_bounds(complexity);

  auto* cover = app.add_subcommand("cover2", "a sum of points and shuffles M with e <=_2 M");
  cover->add_option("expr", subject)->required();

  bool shuffle_axioms = false;
  auto* emit = app.add_subcommand("emit", "emit a Scott sentence (finite order) or shuffle axioms");
  emit->add_option("subject", subject, "finite order like [0,1] or, with --shuffle, a color set")->required();
  emit->add_flag("--shuffle", shuffle_axioms, "axioms for Sh(S)");

  std::string relation, left_tuple, right_tuple;
  auto* oracle = app.add_subcommand("oracle", "exhaustive game on explicit finite orders");
  oracle->add_option("relation", relation, "leq or equiv")->required()->check(CLI::IsMember({"leq", "equiv"}));
  oracle->add_option("-n,--rank", rank)->capture_default_str();
  oracle->add_option("left", left, "finite order like [0,1]")->required();
  oracle->add_option("right", right, "finite order like [0,0]")->required();
  oracle->add_option("--left-tuple", left_tuple, "ascending positions like [0]");
  oracle->add_option("--right-tuple", right_tuple, "ascending positions like [1]");
  oracle->add_flag("--certificate", want_cert, "print a strategy or refutation tree");

  std::size_t max_size = 2, max_colors = 2;
  auto* enumerate = app.add_subcommand("enumerate", "list finite orders in length-lexicographic order");
  enumerate->add_option("--max-size", max_size)->capture_default_str();
  enumerate->add_option("--max-colors", max_colors)->capture_default_str();

  std::string file;
  auto* batch = app.add_subcommand("batch", "run one command per line of FILE");
  batch->add_option("file", file)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kTrue;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kTrue;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  Engine eng(eo);
  json doc{{"schema", kSchema}};
  int code = kTrue;

  auto finish = [&] {
    if (stats) {
      const auto s = eng.stats();
      if (as_json)
        doc["stats"] = {{"hits", s.hits}, {"misses", s.misses}, {"max_depth", s.max_depth}, {"interned", s.interned}};
      else
        err << "memo: hits=" << s.hits << " misses=" << s.misses << " max_depth=" << s.max_depth
            << " interned=" << s.interned << "\n";
    }
    if (as_json) out << doc.dump(2) << "\n";
    return code;
  };

  try {
    if (leq->parsed() || equiv->parsed()) {
      const bool is_leq = leq->parsed();
      GameQuery q{parse_expr(left), std::nullopt, parse_expr(right), std::nullopt, rank};
      if (left_cut.empty() != right_cut.empty()) throw ParseError("give both --left-cut and --right-cut or neither", 0);
      if (!left_cut.empty()) {
        q.left_cut = parse_descriptor(left_cut, q.left);
        q.right_cut = parse_descriptor(right_cut, q.right);
      }
      Outcome o;
      if (is_leq) {
        o = eng.leq(q);
      } else if (q.left_cut) {
        o = eng.equiv_tuples(q.left, *q.left_cut, q.right, *q.right_cut, rank);
      } else {
        o = eng.equiv(q.left, q.right, rank);
      }
      code = detail::exit_for(o);
      doc["verb"] = is_leq ? "leq" : "equiv";
      doc["left"] = to_string(q.left);
      doc["right"] = to_string(q.right);
      doc["rank"] = rank;
      doc["verdict"] = to_string(o.verdict);
      if (o.is_inconclusive()) doc["note"] = o.note;
      if (!as_json) {
        out << to_string(o.verdict);
        if (o.is_inconclusive()) out << ": " << o.note;
        out << "\n";
      }
      if (is_leq && want_cert && !o.is_inconclusive()) {
        const auto cert = eng.certificate(q);
        json certs = json::array();
        if (!cert->colors_agree && !as_json) out << "tuples disagree at rank 0\n";
        for (const auto& c : cert->intervals) {
          if (as_json)
            certs.push_back(detail::to_json(c));
          else
            detail::print_tree(out, c, 0);
        }
        doc["certificate"] = {{"colors_agree", cert->colors_agree},
                              {"pick_cap", eo.cert_pick_cap},
                              {"max_total", eo.cert_max_total},
                              {"intervals", certs}};
        if (!as_json)
          out << "(forall-moves enumerated with at most " << eo.cert_pick_cap << " picks per block, "
              << eo.cert_max_total << " in total)\n";
      }
    } else if (classes->parsed()) {
      const OrderExpr e = normalize(parse_expr(subject));
      const auto cls = eng.element_classes(e, rank);
      code = cls.status.is_inconclusive() ? kInconclusive : kTrue;
      json arr = json::array();
      for (const auto& c : cls.classes) {
        json members = json::array();
        for (const auto& d : c) members.push_back(to_string(d));
        arr.push_back(members);
      }
      doc["verb"] = "classes";
      doc["expr"] = to_string(e);
      doc["rank"] = rank;
      doc["classes"] = arr;
      if (cls.status.is_inconclusive()) doc["note"] = cls.status.note;
      if (!as_json) {
        out << cls.classes.size() << " classes of single elements of " << to_string(e) << " at rank " << rank << "\n";
        for (const auto& c : cls.classes) {
          out << " ";
          for (const auto& d : c) out << " " << detail::show_cut(d);
          out << "\n";
        }
        if (has_omega(e)) out << "(omega positions listed up to the horizon H(" << rank << "))\n";
        if (cls.status.is_inconclusive()) out << "inconclusive: " << cls.status.note << "\n";
      }
    } else if (rank_cmd->parsed()) {
      const OrderExpr e = parse_expr(subject);
      const RankReport r = rank_report(eng, e, bounds);
      const bool pinned = r.sr_upper && r.srp_upper && *r.sr_upper == r.sr_lower && *r.srp_upper == r.srp_lower;
      code = pinned ? kTrue : kInconclusive;
      doc["verb"] = "rank";
      doc["expr"] = to_string(normalize(e));
      doc["report"] = detail::report_json(r);
      if (!as_json) detail::report_text(out, r);
    } else if (complexity->parsed()) {
      const OrderExpr e = parse_expr(subject);
      const ComplexityResult c = scott_complexity(eng, e, bounds);
      code = c.tag ? kTrue : kInconclusive;
      doc["verb"] = "complexity";
      doc["expr"] = to_string(normalize(e));
      if (c.tag) doc["complexity"] = to_string(*c.tag);
      if (c.report) doc["report"] = detail::report_json(*c.report);
      if (!as_json) {
        out << (c.tag ? to_string(*c.tag) : "unknown (partial bounds)") << "\n";
        if (c.report) detail::report_text(out, *c.report);
      }
    } else if (cover->parsed()) {
      const OrderExpr e = parse_expr(subject);
      const OrderExpr m = cover2(e);
      const Outcome check = eng.leq(e, m, 2);
      code = check.is_inconclusive() ? kInconclusive : kTrue;
      doc["verb"] = "cover2";
      doc["expr"] = to_string(normalize(e));
      doc["cover"] = to_string(m);
      doc["leq2"] = to_string(check.verdict);
      if (!as_json) out << to_string(m) << "\n" << "e <=_2 cover: " << to_string(check.verdict) << "\n";
      if (check.is_false()) throw std::logic_error("cover2 produced a non-cover");
    } else if (emit->parsed()) {
      std::vector<Formula> fs;
      if (shuffle_axioms) {
        const auto cs = parse_colors(subject);
        fs = emit_shuffle_axioms(std::set<Color>(cs.begin(), cs.end()));
      } else {
        fs.push_back(emit_scott_sentence_finite(parse_finite_order(subject)));
      }
      json arr = json::array();
      for (const auto& f : fs) {
        const auto [s, p] = levels(f);
        arr.push_back({{"formula", to_string(f)}, {"sigma", s}, {"pi", p}});
        if (!as_json) out << to_string(f) << "\n";
      }
      doc["verb"] = "emit";
      doc["formulas"] = arr;
    } else if (oracle->parsed()) {
      PebbledPair p{parse_finite_order(left), parse_tuple(left_tuple), parse_finite_order(right), parse_tuple(right_tuple)};
      validate(p);
      FiniteOracle orc;
      bool v = orc.leq(p, rank);
      if (relation == "equiv") v = v && orc.leq({p.right, p.right_tuple, p.left, p.left_tuple}, rank);
      code = v ? kTrue : kFalse;
      doc["verb"] = "oracle";
      doc["relation"] = relation;
      doc["rank"] = rank;
      doc["verdict"] = v ? "true" : "false";
      if (!as_json) out << (v ? "true" : "false") << "\n";
      if (want_cert) {
        const auto cert = orc.certificate(p, rank);
        if (as_json)
          doc["certificate"] = detail::to_json(cert);
        else
          detail::print_tree(out, cert, 0);
      }
    } else if (enumerate->parsed()) {
      json arr = json::array();
      for_each_order(max_size, max_colors, [&](const FiniteOrder& o) {
        arr.push_back(to_string(o.colors));
        if (!as_json) out << to_string(o.colors) << "\n";
      });
      doc["verb"] = "enumerate";
      doc["orders"] = arr;
    } else if (batch->parsed()) {
      std::ifstream in(file);
      if (!in) throw ParseError("cannot read " + file, 0);
      std::string line;
      std::size_t lineno = 0;
      bool any_usage = false, any_inconclusive = false;
      json results = json::array();
      while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<std::string> sub;
        std::ostringstream o, e;
        int c = kUsage;
        try {
          sub = detail::words(line);
          if (!sub.empty() && sub.front() == "bfscott") sub.erase(sub.begin());
          if (!sub.empty() && sub.front() == "batch") throw ParseError("nested batch", 0);
          if (as_json && std::find(sub.begin(), sub.end(), "--json") == sub.end()) sub.insert(sub.begin(), "--json");
          c = run(sub, o, e);
        } catch (const std::exception& ex) {
          e << ex.what() << "\n";
        }
        any_usage = any_usage || c == kUsage;
        any_inconclusive = any_inconclusive || c == kInconclusive;
        if (as_json) {
          json r{{"line", lineno}, {"exit", c}};
          try {
            if (!o.str().empty()) r["result"] = json::parse(o.str());
          } catch (const json::exception&) {
            r["output"] = o.str();
          }
          if (!e.str().empty()) r["error"] = e.str();
          results.push_back(r);
        } else {
          out << "line " << lineno << " exit " << c << ": " << o.str();
          if (o.str().empty() || o.str().back() != '\n') out << "\n";
          if (!e.str().empty()) out << "  " << e.str();
        }
      }
      code = any_usage ? kUsage : any_inconclusive ? kInconclusive : kTrue;
      doc["verb"] = "batch";
      doc["results"] = results;
    }
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const FormulaParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return finish();
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace bfscott::cli
