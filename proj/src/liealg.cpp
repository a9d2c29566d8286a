// liealg.cpp — bracket closures, generator families, condition checks
#include "liegal/liealg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace liegal::liealg {

using galerkin::CompatibilityWitness;

Matrix bracket(const Matrix& x, const Matrix& y) { return x * y - y * x; }

const Generator& GeneratorFamily::find(const std::string& label) const {
  for (const auto& g : gens)
    if (g.label == label) return g;
  throw std::invalid_argument("unknown generator label: " + label);
}

// ---------- labels ----------

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string act_label(int gap, double sigma, int j) {
  return "E[" + std::to_string(gap) + ":" + fmt_g(sigma) + "]B" + std::to_string(j);
}

std::string xi_tag(Complex xi) {
  if (xi == Complex(1, 0)) return "1";
  if (xi == Complex(0, 1)) return "i";
  if (xi == Complex(-1, 0)) return "-1";
  if (xi == Complex(0, -1)) return "-i";
  return "(" + fmt_g(xi.real()) + "," + fmt_g(xi.imag()) + ")";
}

bool nearly_zero(const Matrix& m) { return m.norm() < 1e-14; }

double inner(const Matrix& x, const Matrix& y) {
  return (x.conjugate().cwiseProduct(y)).sum().real();  // Re tr(X^* Y)
}

}  // namespace

// ---------- families ----------

namespace {

struct FamilyContext {
  galerkin::TruncatedSystem sys;
  galerkin::GapSet gaps;
  std::vector<std::vector<CompatibilityWitness>> wit;  // [gap][j-1]
  std::vector<std::string> caveats;
};

FamilyContext family_context(const models::QuantumModel& model, int n, double gap_tol) {
  FamilyContext ctx;
  ctx.sys = galerkin::truncate(model, n);
  ctx.gaps = galerkin::spectral_gaps(ctx.sys, gap_tol);
  ctx.wit.resize(ctx.gaps.values.size());
  for (size_t g = 0; g < ctx.gaps.values.size(); ++g) {
    ctx.wit[g].reserve(model.p);
    for (int j = 1; j <= model.p; ++j) {
      auto w = galerkin::xi_membership(model, n, static_cast<int>(g), ctx.gaps, j, 0, gap_tol);
      if (!w.guaranteed && !w.caveat.empty())
        ctx.caveats.push_back("(sigma=" + fmt_g(w.sigma) + ", j=" + std::to_string(j) + "): " +
                              w.caveat);
      ctx.wit[g].push_back(std::move(w));
    }
  }
  return ctx;
}

Generator drift_gen(const galerkin::TruncatedSystem& sys) {
  Generator g;
  g.label = "A";
  g.m = sys.drift();
  g.kind = GenKind::drift;
  return g;
}

}  // namespace

GeneratorFamily assemble_v0(const models::QuantumModel& model, int n, double gap_tol) {
  auto ctx = family_context(model, n, gap_tol);
  GeneratorFamily fam;
  fam.sys = ctx.sys;
  fam.gaps = ctx.gaps;
  fam.small_n = n;
  fam.bounds = model.bounds;
  fam.caveats = ctx.caveats;
  fam.gens.push_back(drift_gen(ctx.sys));
  for (size_t g = 0; g < ctx.gaps.values.size(); ++g) {
    for (int j = 1; j <= model.p; ++j) {
      if (!ctx.wit[g][j - 1].member) continue;
      const bool zero_ok = ctx.wit[0][j - 1].member;
      const bool symmetric = model.bounds[j - 1].kind == models::BoundKind::symmetric;
      if (!(zero_ok || (g != 0 && symmetric))) continue;
      Matrix m = galerkin::excite(ctx.sys.b[j - 1], static_cast<int>(g), ctx.gaps);
      if (nearly_zero(m)) continue;
      Generator gen;
      gen.label = act_label(static_cast<int>(g), ctx.gaps.values[g], j);
      gen.m = std::move(m);
      gen.kind = g == 0 ? GenKind::zero_gap : GenKind::activation;
      gen.j = j;
      gen.gap = static_cast<int>(g);
      gen.sigma = ctx.gaps.values[g];
      fam.gens.push_back(std::move(gen));
    }
  }
  return fam;
}

namespace {

GeneratorFamily assemble_v_impl(const models::QuantumModel& model, int n, int big_n,
                                const std::vector<Complex>& xi_set, double varpi_scale,
                                double gap_tol) {
  auto ctx = family_context(model, n, gap_tol);
  const galerkin::TruncatedSystem big_sys =
      big_n > n ? galerkin::truncate(model, big_n) : ctx.sys;
  const galerkin::GapSet big_gaps =
      big_n > n ? galerkin::spectral_gaps(big_sys, gap_tol) : ctx.gaps;

  GeneratorFamily fam;
  fam.sys = big_sys;
  fam.gaps = big_gaps;
  fam.small_n = n;
  fam.bounds = model.bounds;
  fam.caveats = ctx.caveats;
  for (size_t g = 1; g < ctx.gaps.values.size(); ++g) {  // sigma != 0 only
    for (int j = 1; j <= model.p; ++j) {
      if (!ctx.wit[g][j - 1].member) continue;
      Matrix small = galerkin::excite(ctx.sys.b[j - 1], static_cast<int>(g), ctx.gaps);
      if (nearly_zero(small)) continue;
      const int big_gap =
          big_n > n ? big_gaps.find(ctx.gaps.values[g], gap_tol) : static_cast<int>(g);
      if (big_gap < 0) throw std::runtime_error("assemble_v: gap missing from the extension");
      Matrix base = big_n > n
                        ? galerkin::excite(big_sys.b[j - 1], big_gap, big_gaps)
                        : std::move(small);
      for (Complex xi : xi_set) {
        Generator gen;
        gen.m = galerkin::j_rotate(base, xi, big_sys);
        if (varpi_scale > 0) gen.m *= varpi_scale * model.bounds[j - 1].delta;
        gen.label = (varpi_scale > 0 ? "w." : "") + ("J" + xi_tag(xi)) + "." +
                    act_label(static_cast<int>(g), ctx.gaps.values[g], j);
        gen.kind = GenKind::activation_rot;
        gen.j = j;
        gen.gap = big_gap;
        gen.sigma = ctx.gaps.values[g];
        gen.xi = xi;
        fam.gens.push_back(std::move(gen));
      }
    }
  }
  return fam;
}

GeneratorFamily assemble_w_impl(const models::QuantumModel& model, int n, int big_n,
                                double varpi, double gap_tol) {
  auto ctx = family_context(model, n, gap_tol);
  const galerkin::TruncatedSystem big_sys =
      big_n > n ? galerkin::truncate(model, big_n) : ctx.sys;
  const galerkin::GapSet big_gaps =
      big_n > n ? galerkin::spectral_gaps(big_sys, gap_tol) : ctx.gaps;

  GeneratorFamily fam;
  fam.sys = big_sys;
  fam.gaps = big_gaps;
  fam.small_n = n;
  fam.bounds = model.bounds;
  fam.caveats = ctx.caveats;
  fam.gens.push_back(drift_gen(big_sys));

  auto big_excite = [&](int small_gap, int j) {
    const int bg = big_n > n ? big_gaps.find(ctx.gaps.values[small_gap], gap_tol)
                             : small_gap;
    if (bg < 0) throw std::runtime_error("assemble_w: gap missing from the extension");
    return galerkin::excite(big_sys.b[j - 1], bg, big_gaps);
  };

  for (int j = 1; j <= model.p; ++j) {
    const double delta = model.bounds[j - 1].delta;
    const bool symmetric = model.bounds[j - 1].kind == models::BoundKind::symmetric;
    const bool zero_ok = ctx.wit[0][j - 1].member;
    const Matrix small_zero = galerkin::excite(ctx.sys.b[j - 1], 0, ctx.gaps);
    const bool zero_nonempty = !nearly_zero(small_zero);

    if (zero_ok && zero_nonempty) {
      Generator gen;
      gen.m = delta * big_excite(0, j);
      gen.label = act_label(0, 0.0, j);
      gen.kind = GenKind::zero_gap;
      gen.j = j;
      gen.gap = 0;
      gen.sigma = 0.0;
      fam.gens.push_back(std::move(gen));
    }
    for (size_t g = 1; g < ctx.gaps.values.size(); ++g) {
      if (!ctx.wit[g][j - 1].member) continue;
      Matrix small_act = galerkin::excite(ctx.sys.b[j - 1], static_cast<int>(g), ctx.gaps);
      if (nearly_zero(small_act)) continue;
      const Matrix act = big_excite(static_cast<int>(g), j);
      if (zero_ok && zero_nonempty) {
        Generator gen;
        gen.m = delta * (big_excite(0, j) + varpi * act);
        gen.label = "E0+w." + act_label(static_cast<int>(g), ctx.gaps.values[g], j);
        gen.kind = GenKind::zero_plus_activation;
        gen.j = j;
        gen.gap = static_cast<int>(g);
        gen.sigma = ctx.gaps.values[g];
        fam.gens.push_back(std::move(gen));
      }
      if ((zero_ok && !zero_nonempty) || symmetric) {
        // with an empty zero-gap part, E_0 + varpi E_sigma degenerates to this
        Generator gen;
        gen.m = delta * varpi * act;
        gen.label = "w.J1." + act_label(static_cast<int>(g), ctx.gaps.values[g], j);
        gen.kind = GenKind::activation_rot;
        gen.j = j;
        gen.gap = static_cast<int>(g);
        gen.sigma = ctx.gaps.values[g];
        gen.xi = Complex(1, 0);
        fam.gens.push_back(std::move(gen));
      }
    }
  }
  return fam;
}

}  // namespace

GeneratorFamily assemble_v(const models::QuantumModel& model, int n,
                           const std::vector<Complex>& xi_set, double gap_tol) {
  return assemble_v_impl(model, n, n, xi_set, 0.0, gap_tol);
}

GeneratorFamily assemble_v_extended(const models::QuantumModel& model, int n, int big_n,
                                    const std::vector<Complex>& xi_set, double gap_tol) {
  return assemble_v_impl(model, n, big_n, xi_set, 0.0, gap_tol);
}

GeneratorFamily assemble_w(const models::QuantumModel& model, int n, double varpi,
                           double gap_tol) {
  return assemble_w_impl(model, n, n, varpi, gap_tol);
}

GeneratorFamily assemble_w_extended(const models::QuantumModel& model, int n, int big_n,
                                    double varpi, double gap_tol) {
  return assemble_w_impl(model, n, big_n, varpi, gap_tol);
}

// ---------- Lie closure ----------

namespace {

// Twice-through modified Gram–Schmidt; returns the residual norm of m against
// the basis and leaves the orthogonal part in m.
double orthogonalize(Matrix& m, const std::vector<Matrix>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const Matrix& b : basis) m -= inner(b, m) * b;
  return m.norm();
}

}  // namespace

ClosureResult lie_closure(const std::vector<Generator>& gens, const ClosureOptions& opts) {
  if (gens.empty()) throw std::invalid_argument("lie_closure: no generators");
  const int n = static_cast<int>(gens.front().m.rows());
  for (const auto& g : gens) require_skew(g.m, 1e-8, "generator " + g.label);
  const double tol = opts.rank_tol;
  const int max_depth = opts.max_depth > 0 ? opts.max_depth : 2 * n;
  const int max_dim = opts.max_dim > 0 ? opts.max_dim : n * n;

  ClosureResult out;
  std::vector<int> last_layer;
  for (size_t i = 0; i < gens.size(); ++i) {
    Matrix m = gens[i].m;
    const double norm = m.norm();
    if (norm < 1e-14) continue;
    m /= norm;
    if (orthogonalize(m, out.basis) <= tol) continue;
    m /= m.norm();
    out.basis.push_back(std::move(m));
    out.words.push_back("g" + std::to_string(i));
    last_layer.push_back(static_cast<int>(out.basis.size()) - 1);
  }

  for (int depth = 1; depth <= max_depth && !last_layer.empty(); ++depth) {
    if (static_cast<int>(out.basis.size()) >= max_dim) break;
    std::vector<int> next_layer;
    for (int i : last_layer) {
      for (int j = 0; j < i; ++j) {
        Matrix m = bracket(out.basis[i], out.basis[j]);
        const double norm = m.norm();
        if (norm < 1e-14) continue;
        m /= norm;
        if (orthogonalize(m, out.basis) <= tol) continue;
        m /= m.norm();
        out.basis.push_back(std::move(m));
        out.words.push_back("[" + out.words[i] + "," + out.words[j] + "]");
        next_layer.push_back(static_cast<int>(out.basis.size()) - 1);
        if (static_cast<int>(out.basis.size()) >= max_dim) break;
      }
      if (static_cast<int>(out.basis.size()) >= max_dim) break;
    }
    out.depth_reached = depth;
    if (static_cast<int>(out.basis.size()) >= max_dim) break;
    if (next_layer.empty()) { last_layer.clear(); break; }
    // include brackets among the new layer as well
    std::vector<int> merged = next_layer;
    for (size_t a = 0; a < next_layer.size(); ++a)
      for (size_t b = 0; b < a; ++b) {
        if (static_cast<int>(out.basis.size()) >= max_dim) break;
        Matrix m = bracket(out.basis[next_layer[a]], out.basis[next_layer[b]]);
        const double norm = m.norm();
        if (norm < 1e-14) continue;
        m /= norm;
        if (orthogonalize(m, out.basis) <= tol) continue;
        m /= m.norm();
        out.basis.push_back(std::move(m));
        out.words.push_back("[" + out.words[next_layer[a]] + "," + out.words[next_layer[b]] + "]");
        merged.push_back(static_cast<int>(out.basis.size()) - 1);
      }
    last_layer = std::move(merged);
  }
  out.truncated = !last_layer.empty() && static_cast<int>(out.basis.size()) < n * n;
  out.dim = static_cast<int>(out.basis.size());
  return out;
}

double span_residual(const ClosureResult& closure, const Matrix& x) {
  const double norm = x.norm();
  if (norm < 1e-300) return 0.0;
  Matrix m = x / norm;
  return orthogonalize(m, closure.basis);
}

namespace {

Matrix word_matrix(const std::vector<Generator>& gens, const std::string& w, size_t& pos) {
  if (pos >= w.size()) throw std::invalid_argument("certificate word truncated");
  if (w[pos] == '[') {
    ++pos;  // '['
    Matrix left = word_matrix(gens, w, pos);
    if (pos >= w.size() || w[pos] != ',') throw std::invalid_argument("certificate word malformed");
    ++pos;  // ','
    Matrix right = word_matrix(gens, w, pos);
    if (pos >= w.size() || w[pos] != ']') throw std::invalid_argument("certificate word malformed");
    ++pos;  // ']'
    return bracket(left, right);
  }
  if (w[pos] != 'g') throw std::invalid_argument("certificate word malformed");
  ++pos;
  size_t start = pos;
  while (pos < w.size() && std::isdigit(static_cast<unsigned char>(w[pos]))) ++pos;
  const size_t idx = std::stoul(w.substr(start, pos - start));
  if (idx >= gens.size()) throw std::invalid_argument("certificate references a missing generator");
  return gens[idx].m;
}

}  // namespace

int replay_certificate(const std::vector<Generator>& gens,
                       const std::vector<std::string>& words, double rank_tol) {
  std::vector<Matrix> basis;
  for (const auto& w : words) {
    size_t pos = 0;
    Matrix m = word_matrix(gens, w, pos);
    const double norm = m.norm();
    if (norm < 1e-14) continue;
    m /= norm;
    if (orthogonalize(m, basis) <= rank_tol) continue;
    m /= m.norm();
    basis.push_back(std::move(m));
  }
  return static_cast<int>(basis.size());
}

// ---------- condition checks ----------

namespace {

std::vector<Matrix> su_basis(int n) {
  std::vector<Matrix> out;
  out.reserve(n * n - 1);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Matrix e = Matrix::Zero(n, n);
      e(j, k) = 1; e(k, j) = -1;
      out.push_back(e);
      Matrix f = Matrix::Zero(n, n);
      f(j, k) = Complex(0, 1); f(k, j) = Complex(0, 1);
      out.push_back(f);
    }
  for (int k = 0; k + 1 < n; ++k) {
    Matrix d = Matrix::Zero(n, n);
    d(k, k) = Complex(0, 1); d(k + 1, k + 1) = Complex(0, -1);
    out.push_back(d);
  }
  return out;
}

}  // namespace

ConditionReport check_condition(const models::QuantumModel& model, int n, ConditionKind kind,
                                double rank_tol, double gap_tol) {
  ConditionReport rep;
  rep.kind = kind;
  rep.n = n;
  rep.expected_dim = n * n - 1;
  rep.rank_tol = rank_tol;

  GeneratorFamily fam = kind == ConditionKind::lgcc
                            ? assemble_v0(model, n, gap_tol)
                            : assemble_v(model, n, {Complex(1, 0), Complex(0, 1)}, gap_tol);
  rep.caveats = fam.caveats;
  for (const auto& g : fam.gens) rep.generator_labels.push_back(g.label);
  if (kind == ConditionKind::lgsc && !model.all_bounds_symmetric())
    rep.caveats.push_back("model has non-symmetric bounds; tracking requires symmetric bounds");

  ClosureOptions opts;
  opts.rank_tol = rank_tol;
  ClosureResult closure = lie_closure(fam.gens, opts);
  rep.words = closure.words;

  // dimension of the traceless projection of the closure span
  const Matrix id = Matrix::Identity(n, n);
  std::vector<Matrix> traceless;
  for (const Matrix& b : closure.basis) {
    Matrix t = b - (b.trace() / static_cast<double>(n)) * id;
    const double norm = t.norm();
    if (norm < 1e-14) continue;
    t /= norm;
    if (orthogonalize(t, traceless) <= rank_tol) continue;
    t /= t.norm();
    traceless.push_back(std::move(t));
  }
  rep.closure_dim = static_cast<int>(traceless.size());

  double worst = 0.0;
  for (const Matrix& s : su_basis(n)) worst = std::max(worst, span_residual(closure, s));
  rep.max_su_residual = worst;

  if (kind == ConditionKind::lgcc) {
    rep.holds = rep.closure_dim >= rep.expected_dim && worst <= 10 * rank_tol;
  } else {
    rep.holds = rep.closure_dim == rep.expected_dim && closure.dim == rep.expected_dim;
  }
  return rep;
}

}  // namespace liegal::liealg
