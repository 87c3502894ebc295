// melonic: runs the exact checks and prints one JSON report per line.
// Exit status: 0 all pass, 1 some identity fails, 2 bad configuration or budget.

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "melonic/bilinear.hpp"
#include "melonic/colored_graph.hpp"
#include "melonic/decomposition.hpp"
#include "melonic/matrix_model.hpp"
#include "melonic/report.hpp"
#include "melonic/wick.hpp"

using namespace melonic;
using json = nlohmann::ordered_json;

namespace {

struct Opts {
  int D = 3;
  int K = 1;
  int pmax = 4;
  int deg = 3;
  int nsize = 2;
  int zwindow = 0;
  int nmax = 4;
  std::string file;
  std::string word = "2,2";
};

struct Global {
  int threads = 1;
  std::string format = "json";
  bool timing = false;
};

json exact(const GaussRat& c) {
  if (!c.is_real()) return c.str();
  if (c.re().get_den() == 1 && c.re().get_num().fits_slong_p()) return c.re().get_num().get_si();
  return c.re().get_str();
}

json exact(const mpq_class& q) { return exact(GaussRat(q)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ColoredGraph load_graph(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--file is required");
  const ColoredGraph g = ColoredGraph::from_json(read_file(path));
  const ValidationReport v = validate(g);
  if (!v.ok) throw std::invalid_argument("invalid graph: " + v.message);
  return g;
}

TraceWord parse_word(const std::string& text) {
  TraceWord w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int p = std::stoi(item, &used);
    if (used != item.size() || p < 0) throw std::invalid_argument("bad trace word: " + text);
    w.push_back(p);
  }
  if (w.empty()) throw std::invalid_argument("empty trace word");
  return w;
}

json laurent_json(const LaurentN& l) {
  json j = json::object();
  for (const auto& [e, c] : l.coeffs) j[std::to_string(e)] = exact(mpq_class(c));
  return j;
}

// ---- check builders ----

std::vector<Check> decomposition_checks(const Opts& o, int threads) {
  std::vector<Check> out;
  json p = {{"D", o.D}, {"K", o.K}};
  out.push_back({"decomposition", p, [o, threads](CheckReport& r) {
                   MelonicModel m;
                   m.D = o.D;
                   m.K = o.K;
                   m.threads = threads;
                   m.validate();
                   const auto d = decomposition_residual(m);
                   r.add_residual(d.r1, "givental - intermediate");
                   r.add_residual(d.r2, "intermediate - direct");
                   r.result["direct"] = d.direct.lines();
                 }});
  for (int n = 1; n <= o.nsize; ++n) {
    json q = {{"D", o.D}, {"K", o.K}, {"Nsize", n}};
    out.push_back({"decomposition index-sum oracle", q, [o, n](CheckReport& r) {
                     MelonicModel m;
                     m.D = o.D;
                     m.K = o.K;
                     m.validate();
                     const Series sym = evaluate_N(direct_tensor_z(m), n);
                     r.add_residual(direct_tensor_z(m, n) - sym, "direct oracle - symbolic");
                     r.add_residual(intermediate_field_z(m, n) - sym, "intermediate oracle - symbolic");
                     r.result["Z"] = sym.lines();
                   }});
  }
  return out;
}

std::vector<Check> commutator_checks(const Opts& o) {
  json p = {{"D", o.D}, {"K", o.K}, {"p_max", o.pmax}, {"time_degree", o.deg}};
  return {{"commutator [X,Y] = D Y", p, [o](CheckReport& r) {
             const auto c = commutator_residual(o.D, o.pmax, o.deg, o.K);
             r.add_residual(c.residual, "[X,Y] - D Y");
             r.add_residual(c.sequential_residual, "X(Y m) - Y(X m) - D Y m");
             r.result["monomials"] = c.monomials;
             r.result["plus_sign_gives_minus_DY"] = c.plus_sign_gives_minus_DY;
             r.notes.push_back("X = -sum t d/dt; with X = +sum t d/dt the commutator is -D Y");
           }}};
}

std::vector<Check> bch_checks(const Opts& o) {
  json p = {{"order", o.K}};
  return {{"bch c(D) = D/(1 - e^-D)", p, [o](CheckReport& r) {
             const auto b = bch_series_check(o.K);
             json coeffs = json::array();
             for (std::size_t i = 0; i < b.matrix_log.size(); ++i) {
               coeffs.push_back(exact(b.matrix_log[i]));
               if (b.matrix_log[i] != b.bernoulli[i])
                 r.residual.push_back("D^" + std::to_string(i) + ": matrix log " + b.matrix_log[i].get_str() +
                                      " vs bernoulli " + b.bernoulli[i].get_str());
               if (b.bernoulli[i] != b.sinh_form[i])
                 r.residual.push_back("D^" + std::to_string(i) + ": bernoulli " + b.bernoulli[i].get_str() +
                                      " vs sinh form " + b.sinh_form[i].get_str());
             }
             r.result["coefficients"] = coeffs;
           }}};
}

std::vector<Check> virasoro_checks(const Opts& o) {
  std::vector<Check> out;
  for (int n = -1; n <= o.nmax; ++n) {
    json p = {{"n", n}, {"p_max", o.pmax}, {"time_degree", o.deg}, {"Nsize", o.nsize}};
    out.push_back({"virasoro L_n Z = 0", p, [o, n](CheckReport& r) {
                     OneMatrixModel m;
                     m.p_max = o.pmax;
                     m.max_deg = o.deg;
                     m.nsize = o.nsize;
                     r.add_residual(virasoro_residual(n, m), "L_n Z");
                     if (o.nsize == 0) r.notes.push_back("N symbolic");
                   }});
  }
  return out;
}

std::vector<Check> orthopoly_checks(const Opts& o) {
  std::vector<Check> out;
  for (int n = 1; n <= o.nsize; ++n) {
    json p = {{"Nsize", n}, {"order", o.K}};
    out.push_back({"orthopoly pairing <P_N, x^M> = 0, M < N", p, [o, n](CheckReport& r) {
                     for (int m = 0; m < n; ++m)
                       r.add_residual(orthogonality_residual(n, m, o.K), "M=" + std::to_string(m));
                     r.result["P_N"] = charpoly_expectation(n, o.K).str();
                   }});
    out.push_back({"orthopoly K_N and Z_N identities", p, [o, n](CheckReport& r) {
                     const auto k = kn_identity_residual(n, o.K);
                     r.add_residual(k.kn_ratio_residual, "K_N - Z_{N+1}/((N+1) Z_N)");
                     r.add_residual(k.zn_product_residual, "Z_N - N! prod K_i");
                     r.add_residual(k.charpoly_vs_gram_schmidt, "<det(x-M)> - Gram-Schmidt");
                     for (std::size_t i = 0; i < k.gaussian_ratio_residuals.size(); ++i)
                       if (!k.gaussian_ratio_residuals[i].is_zero())
                         r.residual.push_back("h_" + std::to_string(i) + "/h_0 - " + std::to_string(i) +
                                              "!/N^" + std::to_string(i) + " = " +
                                              k.gaussian_ratio_residuals[i].str());
                     r.notes.push_back("eigenvalue convention: dmu = exp(-N(x^2/2 + g x^4/4)) dx / sqrt(2 pi / N)");
                   }});
  }
  return out;
}

std::vector<Check> hirota_checks(const Opts& o) {
  std::vector<Check> out;
  for (int n = 1; n <= o.nsize; ++n) {
    json p = {{"Nsize", n}, {"p_max", o.pmax}, {"time_degree", o.deg}, {"z_window", o.zwindow}};
    out.push_back({"hirota one-matrix bilinear residue", p, [o, n](CheckReport& r) {
                     const auto b = hirota_residual_1mm(n, o.deg, o.pmax, false, o.zwindow);
                     r.add_residual(b.residual, "res_z");
                     r.result["z_window_used"] = b.z_window;
                     r.notes.push_back(b.convention);
                   }});
  }
  return out;
}

std::vector<Check> conjugation_checks(const Opts& o) {
  std::vector<Check> out;
  for (int c = 1; c <= o.D; ++c)
    for (int sign : {+1, -1}) {
      json p = {{"D", o.D}, {"K", o.K}, {"color", c}, {"sign", sign}, {"p_max", o.pmax}, {"time_degree", o.deg}};
      out.push_back({"conjugation e^Y V e^-Y closed form", p, [o, c, sign](CheckReport& r) {
                       const auto x = conjugation_residual(c, sign, o.D, o.K, o.pmax, o.deg);
                       r.add_residual(x.sandwich_vs_closed, "sandwich - closed");
                       r.add_residual(x.parts_vs_closed, "conjugated parts - closed");
                       r.require(x.b_commutes, "[B,Y] = 0");
                       r.require(x.t0_commutes, "[d/dt_0, Y] = 0");
                       r.require(x.ad2_vanishes, "[A,[A,Y]] = 0");
                       r.require(x.closed_matches_compose, "[A,Y] closed form");
                       r.result["monomials"] = x.monomials;
                       r.notes.push_back("N symbolic; the t_0 charge term is left out of B (it commutes with Y)");
                     }});
    }
  return out;
}

std::vector<Check> tensor_bilinear_checks(const Opts& o) {
  std::vector<Check> out;
  for (int c = 1; c <= o.D; ++c) {
    json p = {{"D", o.D},          {"K", o.K},        {"color", c}, {"Nsize", o.nsize}, {"p_max", o.pmax},
              {"time_degree", o.deg}, {"z_window", o.zwindow}};
    out.push_back({"tensor bilinear residue", p, [o, c](CheckReport& r) {
                     const auto b = tensor_bilinear_residual(c, o.D, o.K, o.nsize, o.deg, o.pmax, o.zwindow);
                     r.add_residual(b.residual, "res_z");
                     r.result["z_window_used"] = b.z_window;
                     r.notes.push_back(b.convention);
                   }});
  }
  json p = {{"D", o.D}, {"K", 0}, {"color", 1}, {"Nsize", o.nsize}, {"p_max", o.pmax}, {"time_degree", o.deg}};
  out.push_back({"tensor bilinear lambda = 0 reduction", p, [o](CheckReport& r) {
                   const auto t = tensor_bilinear_residual(1, o.D, 0, o.nsize, o.deg, o.pmax);
                   const auto h = hirota_residual_1mm(o.nsize, o.deg, o.pmax);
                   auto spectator = [](TimeVar v) { return v.color != 1; };
                   r.add_residual(t.plus_factor.set_times_zero(spectator) - h.plus_factor, "plus factor");
                   r.add_residual(t.minus_factor.set_times_zero(spectator) - h.minus_factor, "minus factor");
                   r.add_residual(t.residual.set_times_zero(spectator) - h.residual, "residue");
                 }});
  return out;
}

std::vector<Check> tutte_checks(const Opts& o) {
  json p = {{"nmax", o.nmax}};
  return {{"tutte planar two-point", p, [o](CheckReport& r) {
             const auto t = planar_two_point(o.nmax);
             json coeffs = json::array();
             json closed = json::array();
             for (int n = 0; n <= o.nmax; ++n) {
               coeffs.push_back(exact(t.extracted[n]));
               closed.push_back(exact(t.closed_form[n]));
               if (!(t.extracted[n] == t.closed_form[n]))
                 r.residual.push_back("n=" + std::to_string(n) + ": wick " + t.extracted[n].str() + " vs closed " +
                                      t.closed_form[n].str());
               if (!(t.signs[n] == GaussRat(n % 2 == 0 ? 1 : -1)))
                 r.residual.push_back("n=" + std::to_string(n) + ": sign " + t.signs[n].str());
             }
             r.require(t.leading_order_ok, "no positive N powers in (1/N)<Tr M^2>");
             r.result["coefficients"] = coeffs;
             r.result["closed_form"] = closed;
             r.notes.push_back("weight exp(-N t4 Tr M^4/4): the raw coefficient of t4^n is (-1)^n times the count");
           }}};
}

std::vector<Check> free_energy_checks(const Opts& o) {
  json p = {{"order", o.K}};
  return {{"free energy genus expansion", p, [o](CheckReport& r) {
             try {
               const Series f = quartic_free_energy(o.K);
               std::set<int> exps;
               for (const auto& [m, c] : f.terms()) exps.insert(m.hn / 2);
               r.result["N_exponents"] = std::vector<int>(exps.rbegin(), exps.rend());
               r.result["F"] = f.lines();
             } catch (const GradingViolation& e) {
               r.require(false, e.what());
             }
           }}};
}

std::vector<Check> graph_degree_checks(const Opts& o) {
  json p = {{"file", o.file}};
  return {{"graph degree", p, [o](CheckReport& r) {
             const ColoredGraph g = load_graph(o.file);
             const Degree d = degree(g);
             r.result["degree"] = d.value;
             r.result["jackets"] = d.jackets;
             if (d.components != 1) r.result["components"] = d.components;
             for (const auto& n : d.notices) r.notes.push_back(n);
           }}};
}

std::vector<Check> graph_jacket_checks(const Opts& o) {
  json p = {{"file", o.file}};
  return {{"graph jackets", p, [o](CheckReport& r) {
             const ColoredGraph g = load_graph(o.file);
             json list = json::array();
             for (const auto& j : jackets(g)) {
               const int rot = jacket_faces_rotation(g, j.cycle);
               const int bic = jacket_faces_bicolored(g, j.cycle);
               std::string cyc;
               for (int c : j.cycle) cyc += std::to_string(c);
               r.require(rot == bic, "jacket " + cyc + ": rotation faces " + std::to_string(rot) +
                                         " = bicolored faces " + std::to_string(bic));
               json e = {{"cycle", j.cycle}, {"V", j.vertices}, {"E", j.edges}, {"F", j.faces}};
               if (j.connected) e["genus"] = genus(j);
               list.push_back(e);
             }
             r.result["jackets"] = list;
           }}};
}

std::vector<Check> moment_matrix_checks(const Opts& o) {
  json p = {{"word", o.word}, {"Nsize", o.nsize}};
  return {{"moment matrix", p, [o](CheckReport& r) {
             const TraceWord w = parse_word(o.word);
             const LaurentN l = hermitian_moment_laurent(w);
             r.result["moment"] = laurent_json(l);
             int slots = 0;
             for (int x : w) slots += x;
             if (slots <= 12) r.require(hermitian_moment_pairings(w, 12) == l, "pairing sum = loop recursion");
             for (int n = 1; n <= o.nsize; ++n) {
               const mpq_class want = hermitian_oracle(w, n);
               if (l.evaluate(n) != want)
                 r.residual.push_back("N=" + std::to_string(n) + ": symbolic " + l.evaluate(n).get_str() +
                                      " vs index sum " + want.get_str());
             }
             r.notes.push_back("Laurent polynomial in N, exponent -> coefficient");
           }}};
}

std::vector<Check> moment_tensor_checks(const Opts& o) {
  json p = {{"file", o.file}, {"Nsize", o.nsize}};
  return {{"moment tensor", p, [o](CheckReport& r) {
             const ColoredGraph g = load_graph(o.file);
             const TensorContraction c = g.to_contraction();
             const LaurentN l = tensor_moment_laurent(c);
             r.result["moment"] = laurent_json(l);
             for (int n = 1; n <= o.nsize; ++n) {
               const mpq_class want = tensor_oracle(c, n);
               if (l.evaluate(n) != want)
                 r.residual.push_back("N=" + std::to_string(n) + ": symbolic " + l.evaluate(n).get_str() +
                                      " vs index sum " + want.get_str());
             }
           }}};
}

struct Leaf {
  CLI::App* app = nullptr;
  Opts opts;
  std::function<std::vector<Check>(const Opts&)> build;
};

enum Flag : unsigned {
  kD = 1,
  kK = 2,
  kPmax = 4,
  kDeg = 8,
  kNsize = 16,
  kZwindow = 32,
  kFile = 64,
  kNmax = 128,
  kWord = 256,
};

void add_flags(Leaf& leaf, unsigned flags) {
  CLI::App* a = leaf.app;
  Opts& o = leaf.opts;
  if (flags & kD) a->add_option("--D", o.D, "tensor rank")->capture_default_str();
  if (flags & kK) a->add_option("--order,-K", o.K, "truncation order")->capture_default_str();
  if (flags & kPmax) a->add_option("--pmax", o.pmax, "largest time index")->capture_default_str();
  if (flags & kDeg) a->add_option("--deg", o.deg, "time degree")->capture_default_str();
  if (flags & kNsize) a->add_option("--nsize", o.nsize, "matrix size")->capture_default_str();
  if (flags & kZwindow) a->add_option("--zwindow", o.zwindow, "z window, 0 = automatic")->capture_default_str();
  if (flags & kFile) a->add_option("--file", o.file, "graph JSON")->required();
  if (flags & kNmax) a->add_option("--nmax", o.nmax, "largest order or Virasoro index")->capture_default_str();
  if (flags & kWord) a->add_option("--word", o.word, "trace exponents, comma separated")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for the quartic melonic tensor model"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "json or text")->capture_default_str()->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--timing", g.timing, "record runtime_ms (reports stop being byte identical)");

  CLI::App* verify = app.add_subcommand("verify", "identity checks")->require_subcommand(1);
  CLI::App* compute = app.add_subcommand("compute", "closed-form comparisons")->require_subcommand(1);
  CLI::App* graph = app.add_subcommand("graph", "colored graph invariants")->require_subcommand(1);
  CLI::App* moment = app.add_subcommand("moment", "Gaussian moments against index sums")->require_subcommand(1);
  for (CLI::App* s : {verify, compute, graph, moment}) s->fallthrough();

  std::vector<std::unique_ptr<Leaf>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, unsigned flags, Opts defaults,
                  std::function<std::vector<Check>(const Opts&)> build) {
    auto l = std::make_unique<Leaf>();
    l->app = parent->add_subcommand(name, help);
    l->app->fallthrough();
    l->opts = defaults;
    l->build = std::move(build);
    add_flags(*l, flags);
    leaves.push_back(std::move(l));
  };

  const Opts base;
  leaf(verify, "decomposition", "direct = intermediate field = e^Y prod Z_1MM", kD | kK | kNsize, base,
       [&g](const Opts& o) { return decomposition_checks(o, g.threads); });
  {
    Opts d = base;
    leaf(verify, "commutator", "[X,Y] = D Y on basis monomials", kD | kK | kPmax | kDeg, d, commutator_checks);
  }
  {
    Opts d = base;
    d.K = 8;
    leaf(verify, "bch", "c(D) series through D^order", kK, d, bch_checks);
  }
  {
    Opts d = base;
    d.nsize = 0;
    d.nmax = 2;
    leaf(verify, "virasoro", "L_n Z_1MM = 0 for n = -1..nmax", kPmax | kDeg | kNsize | kNmax, d, virasoro_checks);
  }
  {
    Opts d = base;
    d.nsize = 3;
    d.K = 2;
    leaf(verify, "orthopoly", "orthogonality and K_N identities for N <= nsize", kNsize | kK, d, orthopoly_checks);
  }
  {
    Opts d = base;
    d.deg = 2;
    leaf(verify, "hirota", "one-matrix bilinear residue for N <= nsize", kNsize | kPmax | kDeg | kZwindow, d,
         hirota_checks);
  }
  {
    Opts d = base;
    d.deg = 2;
    leaf(verify, "conjugation", "e^Y V e^-Y against the closed form", kD | kK | kPmax | kDeg, d, conjugation_checks);
  }
  {
    Opts d = base;
    d.deg = 1;
    d.nsize = 1;
    leaf(verify, "tensor-bilinear", "deformed bilinear residue per color", kD | kK | kNsize | kPmax | kDeg | kZwindow,
         d, tensor_bilinear_checks);
  }
  leaf(compute, "tutte", "planar two-point counts", kNmax, base, tutte_checks);
  {
    Opts d = base;
    d.K = 3;
    leaf(compute, "free-energy", "quartic free energy through t4^order", kK, d, free_energy_checks);
  }
  leaf(graph, "degree", "degree and jacket count", kFile, base, graph_degree_checks);
  leaf(graph, "jackets", "jackets with face counts and genera", kFile, base, graph_jacket_checks);
  leaf(moment, "matrix", "<prod Tr M^p>", kWord | kNsize, base, moment_matrix_checks);
  leaf(moment, "tensor", "tensor invariant moment", kFile | kNsize, base, moment_tensor_checks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::vector<Check> checks;
  for (const auto& l : leaves)
    if (l->app->parsed()) {
      std::string cmd = l->app->get_parent()->get_name() + " " + l->app->get_name();
      try {
        for (auto& c : l->build(l->opts)) {
          json p = {{"command", cmd}};
          for (const auto& [k, v] : c.parameters.items()) p[k] = v;
          c.parameters = p;
          checks.push_back(std::move(c));
        }
      } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
      }
    }

  const auto reports = run_checks(checks, g.threads, g.timing);
  int pass = 0, fail = 0, error = 0;
  for (const auto& r : reports) {
    if (g.format == "json")
      std::cout << r.json_line() << "\n";
    else
      std::cout << r.text();
    (r.status == Status::Pass ? pass : r.status == Status::Fail ? fail : error)++;
  }
  std::cout.flush();
  std::cerr << reports.size() << " checks: " << pass << " pass, " << fail << " fail, " << error << " error\n";
  for (const auto& r : reports)
    if (r.status != Status::Pass)
      std::cerr << "  " << to_string(r.status) << ": " << r.check << " " << r.parameters.dump()
                << (r.error.empty() ? "" : " (" + r.error + ")") << "\n";
  return exit_code(reports);
}
