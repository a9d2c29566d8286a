// io.cpp — JSON/CSV serialization of schedules, controls, and trajectories
#include "liegal/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace liegal::io {

using nlohmann::json;

namespace {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("expected a number or [re, im] pair");
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a matrix (array of rows)");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols)
      throw std::invalid_argument("ragged matrix rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json real_vector_to_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

RealVector real_vector_from_json(const json& j) {
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json segments_to_json(const GeneratorSchedule& sched) {
  json segs = json::array();
  for (const auto& s : sched.segments)
    segs.push_back(json{{"label", s.label}, {"duration", s.duration}});
  return segs;
}

GeneratorSchedule segments_from_json(const json& segs) {
  GeneratorSchedule sched;
  for (const auto& s : segs)
    sched.segments.push_back({s.at("label").get<std::string>(), s.at("duration").get<double>()});
  return sched;
}

json train_to_json(const PulseTrain& t) {
  return json{{"gamma1", t.gamma1},
              {"suppressed", t.suppressed},
              {"xi", complex_to_json(t.xi)},
              {"varpi", t.varpi},
              {"tau0", t.tau0},
              {"spacing", t.spacing},
              {"taus", t.taus},
              {"active_defect", t.active_defect},
              {"worst_suppressed", t.worst_suppressed},
              {"converged", t.converged}};
}

PulseTrain train_from_json(const json& j) {
  PulseTrain t;
  t.gamma1 = j.at("gamma1").get<double>();
  t.suppressed = j.at("suppressed").get<std::vector<double>>();
  t.xi = complex_from_json(j.at("xi"));
  t.varpi = j.at("varpi").get<double>();
  t.tau0 = j.at("tau0").get<double>();
  t.spacing = j.at("spacing").get<double>();
  t.taus = j.at("taus").get<std::vector<double>>();
  t.active_defect = j.at("active_defect").get<double>();
  t.worst_suppressed = j.at("worst_suppressed").get<double>();
  t.converged = j.at("converged").get<bool>();
  return t;
}

json interaction_to_json(const InteractionSchedule& s) {
  json intervals = json::array();
  for (const auto& iv : s.intervals)
    intervals.push_back(json{{"t0", iv.t0},
                             {"t1", iv.t1},
                             {"omega0", iv.omega0},
                             {"slope", iv.slope},
                             {"alpha", iv.alpha},
                             {"v", real_vector_to_json(iv.v)}});
  json trains = json::array();
  for (const auto& t : s.trains) trains.push_back(train_to_json(t));
  json reports = json::array();
  for (const auto& r : s.reports)
    reports.push_back(json{{"label", r.label},
                           {"duration", r.duration},
                           {"pulses", r.pulses},
                           {"active_defect", r.active_defect},
                           {"worst_suppressed", r.worst_suppressed},
                           {"theta_defect", r.theta_defect}});
  return json{{"n", s.n},
              {"N", s.big_n},
              {"intervals", std::move(intervals)},
              {"trains", std::move(trains)},
              {"reports", std::move(reports)},
              {"segment_ends", s.segment_ends},
              {"total_duration", s.total_duration},
              {"omega_end", s.omega_end},
              {"worst_theta_defect", s.worst_theta_defect}};
}

InteractionSchedule interaction_from_json(const json& j) {
  InteractionSchedule s;
  s.n = j.at("n").get<int>();
  s.big_n = j.at("N").get<int>();
  for (const auto& e : j.at("intervals")) {
    synth::InteractionInterval iv;
    iv.t0 = e.at("t0").get<double>();
    iv.t1 = e.at("t1").get<double>();
    iv.omega0 = e.at("omega0").get<double>();
    iv.slope = e.at("slope").get<double>();
    iv.alpha = e.at("alpha").get<int>();
    iv.v = real_vector_from_json(e.at("v"));
    s.intervals.push_back(std::move(iv));
  }
  for (const auto& e : j.at("trains")) s.trains.push_back(train_from_json(e));
  for (const auto& e : j.at("reports")) {
    synth::SegmentReport r;
    r.label = e.at("label").get<std::string>();
    r.duration = e.at("duration").get<double>();
    r.pulses = e.at("pulses").get<int>();
    r.active_defect = e.at("active_defect").get<double>();
    r.worst_suppressed = e.at("worst_suppressed").get<double>();
    r.theta_defect = e.at("theta_defect").get<double>();
    s.reports.push_back(std::move(r));
  }
  s.segment_ends = j.at("segment_ends").get<std::vector<double>>();
  s.total_duration = j.at("total_duration").get<double>();
  s.omega_end = j.at("omega_end").get<double>();
  s.worst_theta_defect = j.at("worst_theta_defect").get<double>();
  return s;
}

json physical_to_json(const PhysicalControl& c) {
  json intervals = json::array();
  for (const auto& iv : c.intervals)
    intervals.push_back(json{{"s0", iv.s0}, {"s1", iv.s1}, {"u", real_vector_to_json(iv.u)}});
  return json{{"intervals", std::move(intervals)},
              {"l1_norms", c.l1_norms},
              {"total_duration", c.total_duration},
              {"schedule_times", c.schedule_times}};
}

PhysicalControl physical_from_json(const json& j) {
  PhysicalControl c;
  for (const auto& e : j.at("intervals")) {
    synth::PhysicalInterval iv;
    iv.s0 = e.at("s0").get<double>();
    iv.s1 = e.at("s1").get<double>();
    iv.u = real_vector_from_json(e.at("u"));
    c.intervals.push_back(std::move(iv));
  }
  c.l1_norms = j.at("l1_norms").get<std::vector<double>>();
  c.total_duration = j.at("total_duration").get<double>();
  c.schedule_times = j.at("schedule_times").get<std::vector<double>>();
  return c;
}

}  // namespace

std::string schedule_to_json_text(const GeneratorSchedule& sched) {
  json j{{"kind", "generator_schedule"}, {"segments", segments_to_json(sched)}};
  return j.dump(2) + "\n";
}

GeneratorSchedule schedule_from_json_text(const std::string& text) {
  json j = json::parse(text);
  return segments_from_json(j.at("segments"));
}

std::string control_to_json_text(const SynthesizedControl& control) {
  json j{{"kind", "synthesized_control"},
         {"model", control.model_name},
         {"n", control.n},
         {"N", control.big_n},
         {"generator_labels", control.generator_labels},
         {"plan", segments_to_json(control.plan)},
         {"schedule", interaction_to_json(control.schedule)},
         {"physical", physical_to_json(control.physical)}};
  return j.dump(2) + "\n";
}

SynthesizedControl control_from_json_text(const std::string& text) {
  json j = json::parse(text);
  if (j.value("kind", "") != "synthesized_control")
    throw std::invalid_argument("not a synthesized_control document");
  SynthesizedControl c;
  c.model_name = j.at("model").get<std::string>();
  c.n = j.at("n").get<int>();
  c.big_n = j.at("N").get<int>();
  c.generator_labels = j.at("generator_labels").get<std::vector<std::string>>();
  c.plan = segments_from_json(j.at("plan"));
  c.schedule = interaction_from_json(j.at("schedule"));
  c.physical = physical_from_json(j.at("physical"));
  return c;
}

std::string control_to_csv_text(const PhysicalControl& control) {
  std::ostringstream out;
  out.precision(17);
  const int p = control.intervals.empty() ? 0 : static_cast<int>(control.intervals[0].u.size());
  out << "s";
  for (int j = 1; j <= p; ++j) out << ",u_" << j;
  out << "\n";
  for (const auto& iv : control.intervals) {
    out << iv.s0;
    for (int j = 0; j < p; ++j) out << "," << iv.u[j];
    out << "\n";
  }
  if (!control.intervals.empty()) {
    out << control.intervals.back().s1;
    for (int j = 0; j < p; ++j) out << "," << control.intervals.back().u[j];
    out << "\n";
  }
  return out.str();
}

std::string trajectory_to_csv_text(const propagate::TrajectoryRecord& record) {
  std::ostringstream out;
  out.precision(17);
  const int n = record.states.empty() ? 0 : static_cast<int>(record.states[0].size());
  out << "t";
  for (int k = 1; k <= n; ++k) out << ",re_" << k << ",im_" << k;
  for (int k = 1; k <= n; ++k) out << ",pop_" << k;
  out << "\n";
  for (size_t i = 0; i < record.times.size(); ++i) {
    out << record.times[i];
    const Vector& psi = record.states[i];
    for (int k = 0; k < n; ++k) out << "," << psi[k].real() << "," << psi[k].imag();
    for (int k = 0; k < n; ++k) out << "," << std::norm(psi[k]);
    out << "\n";
  }
  return out.str();
}

CurveSamples curve_from_json_text(const std::string& text) {
  json j = json::parse(text);
  CurveSamples c;
  c.times = j.at("times").get<std::vector<double>>();
  if (j.contains("moduli")) {
    c.is_moduli = true;
    for (const auto& row : j.at("moduli")) c.moduli.push_back(real_vector_from_json(row));
    if (c.moduli.size() != c.times.size())
      throw std::invalid_argument("curve: times and moduli lengths differ");
  } else if (j.contains("unitaries")) {
    for (const auto& u : j.at("unitaries")) c.unitaries.push_back(matrix_from_json(u));
    if (c.unitaries.size() != c.times.size())
      throw std::invalid_argument("curve: times and unitaries lengths differ");
  } else {
    throw std::invalid_argument("curve: expected a 'moduli' or 'unitaries' field");
  }
  return c;
}

Vector state_from_json_text(const std::string& text) {
  json j = json::parse(text);
  const json& arr = j.is_object() ? j.at("state") : j;
  if (!arr.is_array() || arr.empty()) throw std::invalid_argument("state: expected an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = complex_from_json(arr[i]);
  return v;
}

std::string state_to_json_text(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v[i]));
  return arr.dump(2) + "\n";
}

Matrix matrix_from_json_text(const std::string& text) {
  json j = json::parse(text);
  return matrix_from_json(j.is_object() ? j.at("unitary") : j);
}

std::string matrix_to_json_text(const Matrix& m) { return matrix_to_json(m).dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace liegal::io
