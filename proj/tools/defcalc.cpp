#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "defcalc.hpp"
#include "defcalc/io.hpp"

using nlohmann::json;
using namespace defcalc;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string field = "Q";
  bool json_output = false;
  unsigned jobs = 1;
  std::string output;
};

struct DeformationFlags {
  std::string file;
  int m = 0;
  int n = 0;
  int cpn = 0;
  int d = 0;
  std::string a;
  std::string b;
  std::string alpha = "0";
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& text) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(text, &pos);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + text + "'");
  }
  if (pos != text.size()) throw UsageError("not an integer: '" + text + "'");
  return value;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

/// pmn:<m>,<n> | cpn:<n> | file:<path>
GradedAlgebra parse_algebra(const std::string& spec, const Field& f) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("algebra spec must be pmn:<m>,<n>, cpn:<n> or file:<path>");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "pmn") {
    const auto parts = split(rest, ',');
    if (parts.size() != 2) throw UsageError("pmn needs two integers");
    const int m = parse_int(parts[0]);
    const int n = parse_int(parts[1]);
    if (m < 1 || n < 1) throw UsageError("pmn needs positive m and n");
    return pmn_algebra(m, n, f);
  }
  if (kind == "cpn") {
    const int n = parse_int(rest);
    if (n < 1) throw UsageError("cpn needs a positive n");
    return truncated_poly(n, f, "u");
  }
  if (kind == "file") {
    try {
      return io::algebra_from_json(read_json_file(rest));
    } catch (const json::exception& e) {
      throw UsageError(rest + ": " + e.what());
    }
  }
  throw UsageError("unknown algebra kind '" + kind + "'");
}

/// "i=v,i=v"
CoefficientMap parse_coefficients(const std::string& text, const Field& f) {
  CoefficientMap out;
  if (text.empty()) return out;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("coefficient must be written i=value: '" + item + "'");
    out[parse_int(item.substr(0, eq))] = f.parse_scalar(item.substr(eq + 1));
  }
  return out;
}

/// Nonzero values psi(x, y) for x <= y, keyed "x.y".
json readable_cochain(const GradedAlgebra& r, const Cochain2& psi) {
  json out = json::object();
  for (std::size_t i = 0; i < r.dim(); ++i) {
    for (std::size_t j = i; j < r.dim(); ++j) {
      if (!is_zero(psi.value(i, j))) out[r.name(i) + "." + r.name(j)] = r.format(psi.value(i, j));
    }
  }
  return out;
}

void add_deformation_flags(CLI::App* cmd, DeformationFlags& flags) {
  cmd->add_option("--file", flags.file, "deformation triple as JSON");
  cmd->add_option("--m", flags.m, "first factor CP^m of P_mn");
  cmd->add_option("--n", flags.n, "second factor CP^n of P_mn");
  cmd->add_option("--cpn", flags.cpn, "deformation of H*(CP^n) instead of P_mn");
  cmd->add_option("--d", flags.d, "deformation dimension");
  cmd->add_option("--a", flags.a, "a-coefficients as i=value,...");
  cmd->add_option("--b", flags.b, "b-coefficients as i=value,...");
  cmd->add_option("--alpha", flags.alpha, "coefficient of the monogenic deformation");
}

DeformationTriple build_deformation(const DeformationFlags& flags, const Field& f) {
  if (!flags.file.empty()) {
    try {
      return io::triple_from_json(read_json_file(flags.file));
    } catch (const json::exception& e) {
      throw UsageError(flags.file + ": " + e.what());
    }
  }
  if (flags.cpn > 0) return monogenic_deformation(flags.cpn, flags.d, f.parse_scalar(flags.alpha));
  if (flags.m < 1 || flags.n < 1) throw UsageError("give --file, --cpn or both --m and --n");
  return presented_pmn_deformation(flags.m, flags.n, flags.d, parse_coefficients(flags.a, f),
                                   parse_coefficients(flags.b, f), f);
}

void render_value(std::ostream& os, const json& v) {
  if (v.is_string()) {
    os << v.get<std::string>();
  } else {
    os << v.dump();
  }
}

/// Key/value lines, or aligned columns when the result carries "rows".
std::string render_text(const json& result) {
  std::ostringstream os;
  if (result.contains("rows") && result["rows"].is_array() && !result["rows"].empty()) {
    for (auto it = result.begin(); it != result.end(); ++it) {
      if (it.key() == "rows") continue;
      os << it.key() << ": ";
      render_value(os, it.value());
      os << "\n";
    }
    const json& rows = result["rows"];
    std::vector<std::string> cols;
    for (auto it = rows[0].begin(); it != rows[0].end(); ++it) cols.push_back(it.key());
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width;
    for (const auto& c : cols) width.push_back(c.size());
    for (const auto& row : rows) {
      std::vector<std::string> line;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        std::ostringstream cell;
        if (row.contains(cols[c])) render_value(cell, row[cols[c]]);
        line.push_back(cell.str());
        width[c] = std::max(width[c], line.back().size());
      }
      cells.push_back(std::move(line));
    }
    const auto emit = [&](const std::vector<std::string>& line) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        os << line[c];
        if (c + 1 < line.size()) os << std::string(width[c] - line[c].size() + 2, ' ');
      }
      os << "\n";
    };
    emit(cols);
    for (const auto& line : cells) emit(line);
    return os.str();
  }
  std::size_t w = 0;
  for (auto it = result.begin(); it != result.end(); ++it) w = std::max(w, it.key().size());
  for (auto it = result.begin(); it != result.end(); ++it) {
    os << it.key() << std::string(w - it.key().size() + 2, ' ');
    render_value(os, it.value());
    os << "\n";
  }
  return os.str();
}

void emit(const Options& opt, const json& result) {
  const std::string text = opt.json_output ? result.dump(2) + "\n" : render_text(result);
  if (opt.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.output);
  if (!out) throw UsageError("cannot write " + opt.output);
  out << text;
}

/// Runs f over the inputs with up to `jobs` concurrent workers, keeping input order.
template <class In, class F>
auto parallel_map(const std::vector<In>& inputs, unsigned jobs, F f) {
  using Out = decltype(f(inputs.front()));
  std::vector<Out> out;
  if (jobs <= 1) {
    for (const auto& x : inputs) out.push_back(f(x));
    return out;
  }
  std::vector<std::future<Out>> pending;
  std::size_t next = 0;
  while (next < inputs.size() || !pending.empty()) {
    while (next < inputs.size() && pending.size() < jobs) {
      pending.push_back(std::async(std::launch::async, f, inputs[next]));
      ++next;
    }
    out.push_back(pending.front().get());
    pending.erase(pending.begin());
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformations of graded commutative algebras"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--field", opt.field, "Q or Fp:<p>");
  app.add_flag("--json", opt.json_output, "emit JSON instead of a text table");
  app.add_option("--jobs", opt.jobs, "parallel workers for multi-row commands")->check(CLI::PositiveNumber);
  app.add_option("--output", opt.output, "write the result to a file");

  std::string algebra_spec;
  int d = 0;
  auto* defspace = app.add_subcommand("defspace", "dimension and representatives of Def_d");
  defspace->add_option("--algebra", algebra_spec, "pmn:<m>,<n> | cpn:<n> | file:<path>")->required();
  defspace->add_option("--d", d, "deformation dimension")->required();

  DeformationFlags def_flags;
  auto* classify = app.add_subcommand("classify", "classifying coordinates of a deformation");
  add_deformation_flags(classify, def_flags);
  auto* split_cmd = app.add_subcommand("split", "decide whether a deformation of H*(P_mn) is split");
  add_deformation_flags(split_cmd, def_flags);
  int factor = 1;
  auto* semisplit = app.add_subcommand("semisplit", "decide semi-splitness with respect to a factor");
  add_deformation_flags(semisplit, def_flags);
  semisplit->add_option("--factor", factor, "1 or 2")->check(CLI::Range(1, 2));
  int line = 2;
  auto* qext = app.add_subcommand("qext", "extension of the line invariant to a deformation");
  add_deformation_flags(qext, def_flags);
  qext->add_option("--line", line, "factor containing the line A (1 or 2)")->check(CLI::Range(1, 2));

  int bm = 0;
  int bn = 0;
  int bk = 0;
  bool table = false;
  auto* bound = app.add_subcommand("bound", "rank lower bound for coker beta_k");
  bound->add_option("--m", bm)->required();
  bound->add_option("--n", bn)->required();
  bound->add_option("--k", bk, "odd k (omit with --table)");
  bound->add_flag("--table", table, "all odd k, cross-checked against Def_{k+1} - Def^s_{k+1}");
  auto* lbound = app.add_subcommand("lambda-bound", "rank lower bound for the lambda-weighted forms");
  lbound->add_option("--m", bm)->required();
  lbound->add_option("--n", bn)->required();
  lbound->add_option("--k", bk)->required();

  std::string lambda;
  long strip = 1000;
  auto* cusp = app.add_subcommand("cusp", "integer feasibility of the cusp-curve constraints");
  cusp->add_option("--lambda", lambda, "rational lambda > 1")->required();
  cusp->add_option("--strip-bound", strip, "scan bound |k| for lambda = 3/2");

  auto* pipeline = app.add_subcommand("pipeline", "extension subspaces and containment checks on Def_d(P_mn)");
  pipeline->add_option("--m", bm)->required();
  pipeline->add_option("--n", bn)->required();
  pipeline->add_option("--d", d, "even d (default: all even d up to 2 max(m,n) + 2)");

  auto* verify = app.add_subcommand("verify-algebra", "check the graded algebra axioms");
  verify->add_option("--algebra", algebra_spec, "pmn:<m>,<n> | cpn:<n> | file:<path>")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Field f = [&] {
      try {
        return Field::parse(opt.field);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }();
    json result;
    int status = 0;

    if (*defspace) {
      const GradedAlgebra r = parse_algebra(algebra_spec, f);
      if (d < 1) throw UsageError("--d must be positive");
      const DeformationSpace space(r, d);
      result = {{"field", f.to_string()},
                {"d", d},
                {"dimension", space.dimension()},
                {"dim_cocycles", space.cocycle_dim()},
                {"dim_coboundaries", space.coboundary_dim()}};
      json reps = json::array();
      for (const auto& psi : space.representatives()) reps.push_back(readable_cochain(r, psi));
      result["representatives"] = reps;
    } else if (*classify) {
      const DeformationTriple t = build_deformation(def_flags, f);
      if (pmn_shape(t.base())) {
        result = io::coordinates_to_json(classify_pmn(t));
      } else {
        result = {{"d", t.d()}, {"alpha", io::scalar_to_json(classify_monogenic(t))}};
      }
    } else if (*split_cmd) {
      const SplitResult s = is_split(build_deformation(def_flags, f));
      result = {{"split", s.split}, {"coordinates", io::coordinates_to_json(s.coordinates)}};
      if (!s.split) result["reason"] = s.reason;
    } else if (*semisplit) {
      const DeformationTriple t = build_deformation(def_flags, f);
      const SemiSplitResult s = is_semisplit(t, factor);
      result = {{"factor", factor}, {"semisplit", s.semisplit}};
      if (s.witness) {
        result["lift"] = t.big().format(s.witness->lift);
        result["alpha"] = io::scalar_to_json(s.witness->alpha);
        result["criterion"] = io::report_to_json(s.criterion);
      }
    } else if (*qext) {
      const DeformationTriple t = build_deformation(def_flags, f);
      const auto shape = pmn_shape(t.base());
      if (!shape) throw UsageError("qext needs a deformation of H*(P_mn)");
      const QuantumStructure q = pmn_quantum(shape->first, shape->second, line, f);
      const ExtensionResult res = extension_solve(t, q);
      result = {{"feasible", res.feasible}, {"line", line}, {"unknowns", res.unknowns}, {"equations", res.equations}};
      if (res.feasible) {
        result["witness_verified"] = verify_extension(t, q, *res.psi_tilde).ok();
      } else {
        result["certificate"] = res.certificate;
      }
    } else if (*bound) {
      if (bm < 1 || bn < 1) throw UsageError("--m and --n must be positive");
      if (table) {
        const std::vector<int> ks = coker_ks(bm, bn);
        const auto rows = parallel_map(ks, opt.jobs, [&](int k) { return coker_row(bm, bn, k, f); });
        json out = json::array();
        bool all = true;
        for (const auto& r : rows) {
          out.push_back(io::coker_row_to_json(r));
          all = all && r.matches;
        }
        result = {{"m", bm}, {"n", bn}, {"all_match", all}, {"rows", out}};
        if (!all) status = 1;
      } else {
        if (bk < 1 || bk % 2 == 0) throw UsageError("--k must be odd and positive");
        result = io::bound_to_json(theorem1_bound(bm, bn, bk));
      }
    } else if (*lbound) {
      if (bm < 1 || bn < 1) throw UsageError("--m and --n must be positive");
      result = io::bound_to_json(lambda_bound(bm, bn, bk));
    } else if (*cusp) {
      mpq_class lam;
      try {
        lam = parse_rational(lambda);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (lam <= 1) throw UsageError("--lambda must exceed 1");
      result = io::cusp_to_json(cusp_feasibility(lam, strip));
    } else if (*pipeline) {
      if (bm < 1 || bn < 1) throw UsageError("--m and --n must be positive");
      std::vector<int> ds;
      if (d != 0) {
        if (d < 2 || d % 2 != 0) throw UsageError("--d must be even and at least 2");
        ds.push_back(d);
      } else {
        for (int e = 2; e <= 2 * std::max(bm, bn) + 2; e += 2) ds.push_back(e);
      }
      const auto reports = parallel_map(ds, opt.jobs, [&](int e) { return semisplit_pipeline(bm, bn, e, f); });
      json rows = json::array();
      bool all = true;
      for (const auto& r : reports) {
        rows.push_back(io::pipeline_to_json(r));
        all = all && r.ok();
      }
      result = {{"m", bm}, {"n", bn}, {"field", f.to_string()}, {"ok", all}, {"rows", rows}};
      if (!all) status = 1;
    } else if (*verify) {
      const CheckReport report = verify_algebra(parse_algebra(algebra_spec, f));
      result = io::report_to_json(report);
      if (!report.ok()) status = 1;
    }
    emit(opt, result);
    return status;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
