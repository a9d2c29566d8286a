// models.cpp — built-in spectra/couplings and file-backed models
#include "liegal/models.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>

#include "liegal/io.hpp"

namespace liegal::models {

using nlohmann::json;

bool QuantumModel::all_bounds_symmetric() const {
  for (const auto& b : bounds)
    if (b.kind != BoundKind::symmetric) return false;
  return true;
}

// ---------- particle in a box ----------

namespace {

double well_eigenfunction(int k, double x) {
  return (k % 2 == 1) ? std::sqrt(2.0) * std::cos(k * kPi * x)
                      : std::sqrt(2.0) * std::sin(k * kPi * x);
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// <phi_l, x phi_k> on (-1/2, 1/2), zero by parity when l + k is even.
// Composite panels first: the eigenfunction zeros sit at rationals with small
// denominators, so a naive adaptive pass can sample only zeros and quit early.
double well_dipole(int l, int k) {
  if ((l + k) % 2 == 0) return 0.0;
  auto f = [l, k](double x) { return well_eigenfunction(l, x) * x * well_eigenfunction(k, x); };
  const int panels = 2 * (l + k) + 3;  // odd, finer than the oscillation
  const double width = 1.0 / panels;
  const int depth = 24;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = -0.5 + i * width, b = a + width;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(f, a, b, fa, fm, fb);
    total += adaptive_simpson(f, a, b, fa, fm, fb, whole, 1e-14 / panels, depth);
  }
  return total;
}

struct WellCache {
  std::mutex mu;
  std::map<std::pair<int, int>, double> values;
  double get(int l, int k) {
    if (l > k) std::swap(l, k);  // symmetric integrand
    std::lock_guard<std::mutex> lock(mu);
    auto it = values.find({l, k});
    if (it != values.end()) return it->second;
    const double v = well_dipole(l, k);
    values.emplace(std::make_pair(l, k), v);
    return v;
  }
};

}  // namespace

QuantumModel well_model(double delta, BoundKind kind) {
  if (delta <= 0) throw std::invalid_argument("well_model: delta must be positive");
  QuantumModel m;
  m.name = "well";
  m.p = 1;
  m.n_max = kMaxLevels;
  m.bounds = {ControlBound{kind, delta}};
  m.guarantees.level_bandwidth = std::nullopt;
  m.guarantees.s_weakly_coupled = true;
  m.eigen_num = [](int k) { return -static_cast<long long>(k) * k; };
  m.eigen_scale = kPi * kPi / 2.0;
  m.eigenvalue = [scale = m.eigen_scale](int k) {
    return -scale * static_cast<double>(k) * static_cast<double>(k);
  };
  auto cache = std::make_shared<WellCache>();
  m.coupling = [cache](int j, int l, int k) -> Complex {
    if (j != 1) throw std::invalid_argument("well_model: control index out of range");
    if (l < 1 || k < 1) throw std::invalid_argument("well_model: level index out of range");
    if ((l + k) % 2 == 0) return Complex(0, 0);
    return Complex(0, cache->get(l, k));  // B = i x
  };
  m.support = [](int, int l, int k) { return (l + k) % 2 == 1; };
  return m;
}

// ---------- rigid rotor ----------

RotorIndex rotor_state(int index, int window) {
  if (index < 1) throw std::invalid_argument("rotor_state: index must be >= 1");
  if (window < 0) throw std::invalid_argument("rotor_state: window must be >= 0");
  // level l occupies positions (l^2 - w^2, (l+1)^2 - w^2]
  const long long shifted = index + static_cast<long long>(window) * window;
  int l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(shifted - 1))));
  while (static_cast<long long>(l) * l >= shifted) --l;
  while (static_cast<long long>(l + 1) * (l + 1) < shifted) ++l;
  RotorIndex s;
  s.l = l;
  s.m = static_cast<int>(shifted - 1 - static_cast<long long>(l) * l) - l;
  return s;
}

int rotor_position(const RotorIndex& s, int window) {
  if (std::abs(s.m) > s.l || s.l < window)
    throw std::invalid_argument("rotor_position: invalid state for this window");
  return static_cast<int>(static_cast<long long>(s.l) * s.l -
                          static_cast<long long>(window) * window + s.m + s.l + 1);
}

double rotor_q(int l, int m) {
  return std::sqrt(static_cast<double>(l - m + 2) * (l - m + 1) /
                   (4.0 * (2 * l + 1) * (2 * l + 3)));
}

double rotor_p(int l, int m) {
  return -std::sqrt((static_cast<double>(l + 1) * (l + 1) - static_cast<double>(m) * m) /
                    (static_cast<double>(2 * l + 1) * (2 * l + 3)));
}

namespace {

// Entry of B_j at (row, col) = ((l, m), (l+1, mp)); the lower block follows by
// skew-Hermiticity.
Complex rotor_upper_entry(int j, int l, int m, int mp) {
  switch (j) {
    case 1:  // sum_m ( -q_{l,m} F_{(l,m),(l+1,m-1)} + q_{l,-m} F_{(l,m),(l+1,m+1)} )
      if (mp == m - 1) return Complex(0, -rotor_q(l, m));
      if (mp == m + 1) return Complex(0, rotor_q(l, -m));
      return Complex(0, 0);
    case 2:  // sum_m (  q_{l,m} E_{(l,m),(l+1,m-1)} + q_{l,-m} E_{(l,m),(l+1,m+1)} )
      if (mp == m - 1) return Complex(rotor_q(l, m), 0);
      if (mp == m + 1) return Complex(rotor_q(l, -m), 0);
      return Complex(0, 0);
    case 3:  // sum_m p_{l,m} F_{(l,m),(l+1,m)}
      if (mp == m) return Complex(0, rotor_p(l, m));
      return Complex(0, 0);
    default:
      throw std::invalid_argument("rotor: control index out of range");
  }
}

}  // namespace

QuantumModel rotor_model(double delta, int window) {
  if (delta <= 0) throw std::invalid_argument("rotor_model: delta must be positive");
  if (window < 0) throw std::invalid_argument("rotor_model: window must be >= 0");
  QuantumModel m;
  m.name = window == 0 ? "rotor" : ("rotor@" + std::to_string(window));
  m.p = 3;
  m.n_max = kMaxLevels;
  m.bounds = std::vector<ControlBound>(3, ControlBound{BoundKind::symmetric, delta});
  m.guarantees.level_bandwidth = 1;
  m.guarantees.s_weakly_coupled = true;
  m.eigen_num = [window](int k) {
    const RotorIndex s = rotor_state(k, window);
    return -static_cast<long long>(s.l) * (s.l + 1);
  };
  m.eigen_scale = 1.0;
  m.eigenvalue = [num = m.eigen_num](int k) { return static_cast<double>(num(k)); };
  m.coupling = [window](int j, int l, int k) -> Complex {
    const RotorIndex a = rotor_state(l, window), b = rotor_state(k, window);
    if (b.l == a.l + 1) return rotor_upper_entry(j, a.l, a.m, b.m);
    if (a.l == b.l + 1) return -std::conj(rotor_upper_entry(j, b.l, b.m, a.m));
    return Complex(0, 0);
  };
  m.support = [window](int j, int l, int k) {
    const RotorIndex a = rotor_state(l, window), b = rotor_state(k, window);
    if (std::abs(a.l - b.l) != 1) return false;
    return std::abs(a.m - b.m) == (j == 3 ? 0 : 1);
  };
  return m;
}

// ---------- file-backed models ----------

namespace {

struct FileModelData {
  int p = 0, n_max = 0;
  std::vector<double> eigenvalues;
  // dense per-control coupling tables (file models are small by construction)
  std::vector<Matrix> b;
};

std::string entry_name(int j, int l, int k) {
  return "(j=" + std::to_string(j) + ", l=" + std::to_string(l) + ", k=" + std::to_string(k) + ")";
}

}  // namespace

QuantumModel model_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("model JSON: top level must be an object");
  for (const char* key : {"name", "p", "n_max", "eigenvalues", "bounds", "couplings"})
    if (!doc.contains(key))
      throw std::invalid_argument(std::string("model JSON: missing field '") + key + "'");

  auto data = std::make_shared<FileModelData>();
  QuantumModel m;
  m.name = doc["name"].get<std::string>();
  data->p = m.p = doc["p"].get<int>();
  data->n_max = m.n_max = doc["n_max"].get<int>();
  if (m.p < 1) throw std::invalid_argument("model JSON: p must be >= 1");
  if (m.n_max < 2) throw std::invalid_argument("model JSON: n_max must be >= 2");

  data->eigenvalues = doc["eigenvalues"].get<std::vector<double>>();
  if (static_cast<int>(data->eigenvalues.size()) != m.n_max)
    throw std::invalid_argument("model JSON: eigenvalues must have n_max entries");

  const auto& bounds = doc["bounds"];
  if (!bounds.is_array() || static_cast<int>(bounds.size()) != m.p)
    throw std::invalid_argument("model JSON: bounds must list one entry per control");
  for (const auto& b : bounds) {
    const std::string kind = b.at("kind").get<std::string>();
    const double delta = b.at("delta").get<double>();
    if (kind != "half" && kind != "symmetric")
      throw std::invalid_argument("model JSON: bound kind must be 'half' or 'symmetric'");
    if (delta <= 0) throw std::invalid_argument("model JSON: bound delta must be positive");
    m.bounds.push_back({kind == "half" ? BoundKind::half : BoundKind::symmetric, delta});
  }

  const auto& couplings = doc["couplings"];
  if (!couplings.is_array() || static_cast<int>(couplings.size()) != m.p)
    throw std::invalid_argument("model JSON: couplings must list one table per control");
  data->b.assign(m.p, Matrix::Zero(m.n_max, m.n_max));
  for (int j = 0; j < m.p; ++j) {
    std::vector<std::vector<bool>> listed(m.n_max, std::vector<bool>(m.n_max, false));
    for (const auto& t : couplings[j]) {
      if (!t.is_array() || t.size() != 4)
        throw std::invalid_argument("model JSON: coupling triplets must be [l, k, re, im]");
      const int l = t[0].get<int>(), k = t[1].get<int>();
      if (l < 1 || k < 1 || l > m.n_max || k > m.n_max)
        throw std::invalid_argument("model JSON: coupling index out of range at " +
                                    entry_name(j + 1, l, k));
      const Complex v(t[2].get<double>(), t[3].get<double>());
      if (listed[l - 1][k - 1])
        throw std::invalid_argument("model JSON: duplicate coupling at " + entry_name(j + 1, l, k));
      listed[l - 1][k - 1] = true;
      data->b[j](l - 1, k - 1) = v;
    }
    // fill unlisted mirrors, then verify skew-Hermiticity
    for (int l = 0; l < m.n_max; ++l)
      for (int k = 0; k < m.n_max; ++k)
        if (listed[l][k] && !listed[k][l] && l != k) data->b[j](k, l) = -std::conj(data->b[j](l, k));
    for (int l = 0; l < m.n_max; ++l)
      for (int k = l; k < m.n_max; ++k) {
        const Complex a = data->b[j](l, k), c = data->b[j](k, l);
        const double scale = std::max(1.0, std::max(std::abs(a), std::abs(c)));
        if (std::abs(a + std::conj(c)) > 1e-12 * scale)
          throw std::invalid_argument("model JSON: couplings not skew-Hermitian at " +
                                      entry_name(j + 1, l + 1, k + 1));
      }
  }

  if (doc.contains("guarantees") && doc["guarantees"].is_object()) {
    const auto& g = doc["guarantees"];
    if (g.contains("bandwidth") && !g["bandwidth"].is_null())
      m.guarantees.level_bandwidth = g["bandwidth"].get<int>();
    if (g.contains("s_weakly_coupled"))
      m.guarantees.s_weakly_coupled = g["s_weakly_coupled"].get<bool>();
  }

  m.eigenvalue = [data](int k) {
    if (k < 1 || k > data->n_max)
      throw std::out_of_range("model: level beyond tabulated data");
    return data->eigenvalues[k - 1];
  };
  m.coupling = [data](int j, int l, int k) -> Complex {
    if (j < 1 || j > data->p) throw std::invalid_argument("model: control index out of range");
    if (l < 1 || l > data->n_max || k < 1 || k > data->n_max)
      throw std::out_of_range("model: level beyond tabulated data");
    return data->b[j - 1](l - 1, k - 1);
  };
  return m;
}

QuantumModel load_model(const std::string& path) {
  return model_from_json_text(io::read_file(path));
}

std::string model_to_json_text(const QuantumModel& model, int n_max) {
  if (n_max < 2 || n_max > model.n_max)
    throw std::invalid_argument("model_to_json_text: n_max out of range");
  json doc;
  doc["name"] = model.name;
  doc["p"] = model.p;
  doc["n_max"] = n_max;
  json eig = json::array();
  for (int k = 1; k <= n_max; ++k) eig.push_back(model.eigenvalue(k));
  doc["eigenvalues"] = eig;
  json bounds = json::array();
  for (const auto& b : model.bounds)
    bounds.push_back({{"kind", b.kind == BoundKind::half ? "half" : "symmetric"},
                      {"delta", b.delta}});
  doc["bounds"] = bounds;
  json tables = json::array();
  for (int j = 1; j <= model.p; ++j) {
    json table = json::array();
    for (int l = 1; l <= n_max; ++l)
      for (int k = l; k <= n_max; ++k) {
        const Complex v = model.coupling(j, l, k);
        if (v != Complex(0, 0)) table.push_back({l, k, v.real(), v.imag()});
      }
    tables.push_back(table);
  }
  doc["couplings"] = tables;
  doc["guarantees"] = {{"bandwidth", nullptr}, {"s_weakly_coupled", model.guarantees.s_weakly_coupled}};
  if (model.guarantees.level_bandwidth)
    doc["guarantees"]["bandwidth"] = *model.guarantees.level_bandwidth;
  return doc.dump(2);
}

}  // namespace liegal::models
