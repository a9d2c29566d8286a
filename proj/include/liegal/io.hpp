// io.hpp — JSON/CSV serialization of schedules, controls, and trajectories
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "liegal/propagate.hpp"

namespace liegal::io {

using planner::GeneratorSchedule;
using synth::InteractionSchedule;
using synth::PhysicalControl;
using synth::PulseTrain;

// ---------- generator schedules ----------

std::string schedule_to_json_text(const GeneratorSchedule& sched);
GeneratorSchedule schedule_from_json_text(const std::string& text);

// ---------- synthesized controls ----------

// Bundle of everything a synthesis run produces. `plan` references generator
// labels of the family recorded in `generator_labels`.
struct SynthesizedControl {
  std::string model_name;
  int n = 0, big_n = 0;
  std::vector<std::string> generator_labels;
  GeneratorSchedule plan;
  InteractionSchedule schedule;
  PhysicalControl physical;
};

std::string control_to_json_text(const SynthesizedControl& control);
SynthesizedControl control_from_json_text(const std::string& text);

// CSV of the physical control: s, u_1..u_p (one row per interval start, plus
// the final time).
std::string control_to_csv_text(const PhysicalControl& control);

// ---------- trajectories ----------

// CSV: time, re/im of each coefficient, populations.
std::string trajectory_to_csv_text(const propagate::TrajectoryRecord& record);

// ---------- curves and states ----------

struct CurveSamples {
  std::vector<double> times;
  std::vector<RealVector> moduli;   // either this ...
  std::vector<Matrix> unitaries;    // ... or this is populated
  bool is_moduli = false;
};

CurveSamples curve_from_json_text(const std::string& text);

// Complex state vector: JSON [[re, im], ...] (or ["re", …] for real entries).
Vector state_from_json_text(const std::string& text);
std::string state_to_json_text(const Vector& v);

// Complex matrix: JSON array of rows of [re, im] pairs, or {"unitary": rows}.
Matrix matrix_from_json_text(const std::string& text);
std::string matrix_to_json_text(const Matrix& m);

// ---------- files ----------

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace liegal::io
