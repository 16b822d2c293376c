#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lkl/cocycle.hpp"
#include "lkl/errors.hpp"
#include "lkl/kernels.hpp"
#include "lkl/reps.hpp"
#include "lkl/spectral.hpp"
#include "lkl/verify.hpp"

namespace {

using cd = std::complex<double>;
using namespace lkl;

// Invalid user input; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// "a:b:step" (inclusive), "x,y,..." or a single value.
std::vector<double> parse_grid(const std::string& spec, const std::string& name) {
  std::vector<double> out;
  try {
    if (spec.find(':') != std::string::npos) {
      std::vector<double> p;
      std::stringstream ss(spec);
      std::string tok;
      while (std::getline(ss, tok, ':')) p.push_back(std::stod(tok));
      if (p.size() != 3 || !(p[2] > 0) || p[1] < p[0]) throw UsageError("bad range for --" + name + ": " + spec);
      long n = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9)) + 1;
      for (long i = 0; i < n; ++i) out.push_back(p[0] + i * p[2]);
    } else {
      std::stringstream ss(spec);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    }
  } catch (const std::invalid_argument&) {
    throw UsageError("cannot parse --" + name + ": " + spec);
  }
  if (out.empty()) throw UsageError("empty grid for --" + name);
  return out;
}

std::vector<int> parse_ints(const std::string& spec, const std::string& name) {
  std::vector<int> out;
  std::stringstream ss(spec);
  std::string tok;
  try {
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  } catch (const std::exception&) {
    throw UsageError("cannot parse --" + name + ": " + spec);
  }
  return out;
}

// "l,m" or "l,m;l,m".
std::vector<AngularIndex> parse_alphas(const std::string& spec) {
  std::vector<AngularIndex> out;
  if (spec.empty()) return out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    auto v = parse_ints(item, "alpha");
    if (v.size() != 2) throw UsageError("--alpha expects l,m pairs separated by ';'");
    out.push_back({v[0], v[1]});
  }
  return out;
}

struct Options {
  std::string target, suite, table;
  std::string z = "2", rho = "1", lambda = "1", idx = "0,0,0,0", alpha = "1,0", kind = "calpha_to_calpha";
  std::string what = "kappa", format = "csv", out;
  int l = 1, lp = 1, l0 = 0, q = 1, m = 1, s = 1, sign = 1, n = 1, threads = 0, digits = 0;
  double e2 = 1.0, tol = 1e-13;
  bool e2_given = false;
};

struct Row {
  std::vector<std::string> cells;
};

// Evaluates rows in parallel; output order is the grid order.
std::vector<Row> run_rows(size_t count, int threads, const std::function<Row(size_t)>& fn) {
  std::vector<Row> rows(count);
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        rows[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int nt = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<int>(nt, static_cast<int>(std::max<size_t>(count, 1)));
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

Row value_row(std::vector<std::string> inputs, cd v, double err, long terms, const std::string& status = "OK") {
  inputs.push_back(num(v.real()));
  inputs.push_back(num(v.imag()));
  inputs.push_back(num(err));
  inputs.push_back(std::to_string(terms));
  inputs.push_back(status);
  return {inputs};
}

Row pole_row(std::vector<std::string> inputs) {
  for (int i = 0; i < 3; ++i) inputs.push_back("nan");
  inputs.push_back("0");
  inputs.push_back("POLE");
  return {inputs};
}

const std::vector<std::string> kValueCols = {"re", "im", "error", "terms", "status"};

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

ProjectionKind parse_kind(const std::string& k) {
  if (k == "u_to_cl") return ProjectionKind::UToCl;
  if (k == "cl_to_u") return ProjectionKind::ClToU;
  if (k == "calpha_to_calpha") return ProjectionKind::CalphaToCalpha;
  throw UsageError("--kind must be u_to_cl, cl_to_u or calpha_to_calpha");
}

KernelSpec make_spec(const Options& o, double e2) {
  KernelSpec spec;
  spec.q = o.q;
  spec.alphas = parse_alphas(o.q == 0 ? "" : o.alpha);
  spec.params.e2 = e2;
  spec.params.n = o.n;
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return spec;
}

// Series value with its error bound, scaled by a front factor.
struct Scaled {
  cd value;
  double error = 0;
  long terms = 0;
};

Scaled kweight(const KernelSpec& spec, int l0, double rho, double z, double tol) {
  Scaled s;
  SeriesOptions opt;
  opt.tol = tol;
  cd front = k_front_factor(spec.q, spec.params.e2, z);
  for (const auto& b : k_band(spec, l0)) {
    const FractionSeries& fs = k_matrix_series(spec, l0, b, b);
    if (fs.summands().empty()) continue;
    SeriesValue v = fs.sum(rho, z, opt);
    s.value += front * v.value;
    s.error += std::abs(front) * v.error;
    s.terms += v.terms;
  }
  return s;
}

std::vector<std::string> header(std::vector<std::string> inputs, bool with_values = true) {
  if (with_values) inputs.insert(inputs.end(), kValueCols.begin(), kValueCols.end());
  return inputs;
}

struct Table {
  std::vector<std::string> head;
  std::vector<Row> rows;
};

Table cmd_eval(const Options& o) {
  Table t;
  const double e2 = o.e2_given ? o.e2 : 1.0;
  if (o.target == "umat") {
    auto idx = parse_ints(o.idx, "idx");
    require(idx.size() == 4, "--idx expects l,m,l',m'");
    int l = idx[0], m = idx[1], lp = idx[2], mp = idx[3];
    require(l >= 0 && lp >= 0 && std::abs(m) <= l && std::abs(mp) <= lp, "invalid indices for umat");
    require(m == mp, "umat is diagonal in m; m' must equal m");
    require(std::abs(o.l0) <= std::min(l, lp), "need |l0| <= min(l, l')");
    auto rhos = parse_grid(o.rho, "rho"), lams = parse_grid(o.lambda, "lambda");
    t.head = header({"l0", "l", "m", "lp", "rho", "lambda"});
    t.rows = run_rows(rhos.size() * lams.size(), o.threads, [&](size_t i) {
      double rho = rhos[i / lams.size()], lam = lams[i % lams.size()];
      std::vector<std::string> in = {std::to_string(o.l0), std::to_string(l), std::to_string(m), std::to_string(lp),
                                     num(rho), num(lam)};
      RepLabel lab = RepLabel::principal(o.l0, rho);
      cd quad = u_matrix_element_quadrature(lab, l, m, lp, mp, lam);
      cd exact = lam > 0 ? u_matrix_element_exact(lab, l, m, lp, lam) : quad;
      return value_row(in, exact, std::abs(exact - quad), 0);
    });
  } else if (o.target == "a") {
    auto idx = parse_ints(o.idx, "idx");
    require(idx.size() == 4, "--idx expects l,m,l',m'");
    int l = idx[0], m = idx[1], lp = idx[2], mp = idx[3];
    require(l >= 1 && lp >= 1 && std::abs(m) <= std::min(l, lp) && m == mp, "invalid indices for a");
    auto lams = parse_grid(o.lambda, "lambda");
    t.head = header({"l", "m", "lp", "lambda"});
    ExpPolyIntegrand ex = rep_a_exact(l, m, lp);
    t.rows = run_rows(lams.size(), o.threads, [&](size_t i) {
      double lam = lams[i];
      double quad = rep_a_element(l, m, lp, mp, lam);
      double exact = lam > 0 ? ex.eval(std::abs(lam), 0.0, 0.0).real() : quad;
      if (lam < 0 && (l + lp) % 2) exact = -exact;
      return value_row({std::to_string(l), std::to_string(m), std::to_string(lp), num(lam)}, exact,
                       std::abs(exact - quad), 0);
    });
  } else if (o.target == "b") {
    require(o.l >= 1, "--l must be >= 1");
    auto lams = parse_grid(o.lambda, "lambda");
    t.head = header({"l", "lambda"});
    t.rows = run_rows(lams.size(), o.threads, [&](size_t i) {
      double lam = lams[i];
      cd closed = b_component_closed(o.l, lam);
      cd quad = b_component_integral(o.l, lam);
      return value_row({std::to_string(o.l), num(lam)}, closed, std::abs(closed - quad), 0);
    });
  } else if (o.target == "kernel") {
    auto zs = parse_grid(o.z, "z"), lams = parse_grid(o.lambda, "lambda");
    t.head = header({"q", "z", "lambda"});
    t.rows = run_rows(zs.size() * lams.size(), o.threads, [&](size_t i) {
      double z = zs[i / lams.size()], lam = lams[i % lams.size()];
      require(z >= 0, "--z must be >= 0");
      KernelSpec spec = make_spec(o, 1.0);
      spec.params = ChargeParams::from_z(z, o.n);
      cd v = kernel_value(spec, GroupElement(), boost(lam));
      return value_row({std::to_string(o.q), num(z), num(lam)}, v, 0.0, 0);
    });
  } else if (o.target == "kweight") {
    KernelSpec spec = make_spec(o, e2);
    int lmax = o.q == 0 ? 0 : kernel_l_max(spec.alphas);
    require(std::abs(o.l0) <= lmax, "need |l0| <= l_max");
    auto zs = parse_grid(o.z, "z"), rhos = parse_grid(o.rho, "rho");
    t.head = header({"q", "l0", "z", "rho"});
    t.rows = run_rows(zs.size() * rhos.size(), o.threads, [&](size_t i) {
      double z = zs[i / rhos.size()], rho = rhos[i % rhos.size()];
      std::vector<std::string> in = {std::to_string(o.q), std::to_string(o.l0), num(z), num(rho)};
      try {
        Scaled s = kweight(spec, o.l0, rho, z, o.tol);
        return value_row(in, s.value, s.error, s.terms);
      } catch (const PoleError&) {
        return pole_row(in);
      }
    });
  } else if (o.target == "proj") {
    ProjectionKind kind = parse_kind(o.kind);
    require(o.l >= 1 && o.lp >= 1, "--l and --lp must be >= 1");
    if (kind == ProjectionKind::CalphaToCalpha) require(o.l <= o.lp, "calpha_to_calpha needs l <= l'");
    ProjectionIndices idx{o.l, o.lp, o.l0, e2};
    FractionSeries fs = projection_series(kind, idx);
    auto zs = parse_grid(o.z, "z"), rhos = parse_grid(o.rho, "rho");
    t.head = header({"kind", "l", "lp", "l0", "z", "rho"});
    SeriesOptions opt;
    opt.tol = o.tol;
    t.rows = run_rows(zs.size() * rhos.size(), o.threads, [&](size_t i) {
      double z = zs[i / rhos.size()], rho = rhos[i % rhos.size()];
      std::vector<std::string> in = {o.kind, std::to_string(o.l), std::to_string(o.lp), std::to_string(o.l0), num(z),
                                     num(rho)};
      if (fs.summands().empty()) return value_row(in, 0.0, 0.0, 0);
      try {
        cd front = projection_front_factor(kind, idx, z);
        SeriesValue v = fs.sum(rho, z, opt);
        return value_row(in, front * v.value, std::abs(front) * v.error, v.terms);
      } catch (const PoleError&) {
        return pole_row(in);
      }
    });
  } else if (o.target == "residue") {
    auto zs = parse_grid(o.z, "z");
    if (o.what == "kappa") {
      KernelSpec spec = make_spec(o, e2);
      t.head = {"q", "z", "re", "im", "closed_l1", "status"};
      t.rows = run_rows(zs.size(), o.threads, [&](size_t i) {
        double z = zs[i];
        require(z > 0 && z < 1, "kappa needs 0 < z < 1");
        cd tr = residue_kappa(spec, z).entries.trace();
        bool l1 = spec.q == 1 && spec.alphas[0].l == 1;
        return Row{{std::to_string(o.q), num(z), num(tr.real()), num(tr.imag()),
                    l1 ? num(kappa_closed_l1(e2, z)) : "", "OK"}};
      });
    } else if (o.what == "cyclic") {
      require(o.l >= 1, "--l must be >= 1");
      require(o.sign == 1 || o.sign == -1, "--sign must be 1 or -1");
      t.head = {"l", "sign", "z", "re", "im", "closed_re", "closed_im", "status"};
      t.rows = run_rows(zs.size(), o.threads, [&](size_t i) {
        double z = zs[i];
        cd a = cyclic_residue_series(o.l, z, e2, o.sign), b = cyclic_residue_closed(o.l, z, e2, o.sign);
        return Row{{std::to_string(o.l), std::to_string(o.sign), num(z), num(a.real()), num(a.imag()), num(b.real()),
                    num(b.imag()), "OK"}};
      });
    } else {
      throw UsageError("--what must be kappa or cyclic");
    }
  } else if (o.target == "laurent") {
    require(o.l >= 1 && o.lp >= o.l, "laurent needs 1 <= l <= l'");
    require(std::abs(o.l0) <= o.l, "need |l0| <= min(l, l')");
    require(o.s >= 1 && o.m >= 0, "need s >= 1 and m >= 0");
    ExpPolyIntegrand g = projf_integrand(o.l, o.lp, o.l0);
    FractionSeries fs(g);
    auto zs = parse_grid(o.z, "z");
    t.head = {"l", "lp", "l0", "m", "s", "z", "re", "im", "contour_re", "contour_im", "status"};
    t.rows = run_rows(zs.size(), o.threads, [&](size_t i) {
      double z = zs[i];
      cd a = laurent_coefficient(g, o.m, o.s, z, o.digits);
      cd b = laurent_coefficient_contour(fs, o.m, o.s, z);
      return Row{{std::to_string(o.l), std::to_string(o.lp), std::to_string(o.l0), std::to_string(o.m),
                  std::to_string(o.s), num(z), num(a.real()), num(a.imag()), num(b.real()), num(b.imag()), "OK"}};
    });
  } else {
    throw UsageError("unknown eval target: " + o.target);
  }
  return t;
}

Table cmd_table(const Options& o) {
  if (o.table != "theorem-weights") throw UsageError("unknown table: " + o.table);
  const double e2 = o.e2_given ? o.e2 : 1.0;
  KernelSpec spec = make_spec(o, e2);
  int lmax = o.q == 0 ? 0 : kernel_l_max(spec.alphas);
  auto zs = parse_grid(o.z, "z"), rhos = parse_grid(o.rho, "rho");
  for (double z : zs) require(z > 0 && z <= 5, "table z grid must lie in (0, 5]");
  std::vector<std::tuple<int, double, double>> pts;
  for (int l0 = 0; l0 <= lmax; ++l0)
    for (double z : zs)
      for (double rho : rhos) pts.emplace_back(l0, z, rho);
  Table t;
  t.head = {"l0", "z", "rho", "trace", "supplementary", "status"};
  t.rows = run_rows(pts.size(), o.threads, [&](size_t i) {
    auto [l0, z, rho] = pts[i];
    std::vector<std::string> in = {std::to_string(l0), num(z), num(rho)};
    try {
      DecompositionWeight w = decomposition_weight(spec, l0, rho, z);
      in.push_back(num(w.trace));
      in.push_back(w.has_supplementary ? num(w.supplementary) : "");
      in.push_back("OK");
    } catch (const PoleError&) {
      in.insert(in.end(), {"nan", "", "POLE"});
    }
    return Row{in};
  });
  return t;
}

void write_table(std::ostream& os, const Table& t) {
  for (size_t i = 0; i < t.head.size(); ++i) os << (i ? "," : "") << t.head[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < r.cells.size(); ++i) os << (i ? "," : "") << csv_field(r.cells[i]);
    os << "\n";
  }
}

int cmd_verify(const Options& o, std::ostream& os) {
  if (!is_suite(o.suite)) throw UsageError("unknown suite: " + o.suite);
  if (o.format != "csv" && o.format != "text") throw UsageError("--format must be csv or text");
  auto checks = run_suite(o.suite);
  bool fail = false;
  if (o.format == "csv") os << "suite,criterion,check,anchor,residual,relation,tolerance,status\n";
  for (const auto& c : checks) {
    fail = fail || !c.pass;
    if (o.format == "text") {
      os << format_check_line(c) << "\n";
    } else {
      os << csv_field(c.suite) << "," << c.criterion << "," << csv_field(c.name) << "," << csv_field(c.anchor) << ","
         << num(c.residual) << "," << csv_field(c.relation) << "," << num(c.tolerance) << ","
         << (c.pass ? "PASS" : "FAIL") << "\n";
    }
  }
  return fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal-series matrix elements, cocycle, kernels and spectral weights"};
  app.name("lorentz-kernel-lab");
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  Options o;
  // Shared flags live on the top-level app so that flat config keys match them.
  app.add_option("--z", o.z, "z grid: value, list a,b,c or range a:b:step");
  app.add_option("--rho", o.rho, "rho grid");
  app.add_option("--lambda,--lam", o.lambda, "lambda grid");
  app.add_option("--idx", o.idx, "matrix indices l,m,l',m'");
  app.add_option("--alpha", o.alpha, "cyclic-vector indices l,m[;l,m]");
  app.add_option("--q", o.q, "number of creation operators (0, 1, 2)")->check(CLI::Range(0, 2));
  app.add_option("--l", o.l, "weight l");
  app.add_option("--lp", o.lp, "weight l'");
  app.add_option("--l0", o.l0, "representation index l0");
  app.add_option("--m", o.m, "pole index m (laurent)");
  app.add_option("--s", o.s, "Laurent order s");
  app.add_option("--n", o.n, "charge number n");
  app.add_option("--sign", o.sign, "cyclic residue branch (+1 or -1)");
  app.add_option("--kind", o.kind, "projection kind: u_to_cl, cl_to_u, calpha_to_calpha");
  app.add_option("--what", o.what, "residue: kappa or cyclic");
  auto* e2opt = app.add_option("--e2", o.e2, "coupling e^2 (default: units e = 1)");
  app.add_option("--tol", o.tol, "series tolerance")->check(CLI::Range(1e-300, 1e-2));
  app.add_option("--digits", o.digits, "MPFR digits for Laurent coefficients");
  app.add_option("--threads", o.threads, "worker threads (0: hardware concurrency)");
  app.add_option("--format", o.format, "verify output: csv or text");
  app.add_option("--out", o.out, "output file (default stdout)");

  auto* eval = app.add_subcommand("eval", "evaluate a quantity on a grid")->fallthrough();
  eval->add_option("target", o.target, "umat | a | b | kernel | kweight | proj | residue | laurent")->required();
  auto* verify = app.add_subcommand("verify", "run a verification suite")->fallthrough();
  verify->add_option("suite", o.suite, "consistency | kernels | series | residues | laurent | all")->required();
  auto* table = app.add_subcommand("table", "tabulate decomposition weights")->fallthrough();
  table->add_option("name", o.table, "theorem-weights")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  o.e2_given = e2opt->count() > 0;
  if (o.digits == 0) {
    if (const char* env = std::getenv("LKL_PRECISION_DIGITS")) o.digits = std::atoi(env);
  }

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) {
      std::cerr << "cannot open " << o.out << "\n";
      return 2;
    }
  }
  std::ostream& os = o.out.empty() ? std::cout : file;
  try {
    if (*eval) {
      write_table(os, cmd_eval(o));
      return 0;
    }
    if (*table) {
      write_table(os, cmd_table(o));
      return 0;
    }
    return cmd_verify(o, os);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedCase& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
}
