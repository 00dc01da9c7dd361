#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

namespace mlife {

// Point of the hybrid state space: a discrete label, optionally carrying a
// continuous coordinate. Disabled carries the disability-onset time, and
// DeadWithSpouse the insured/spouse age difference revealed at death.
enum class StateLabel : std::uint8_t {
  Active,
  Disabled,
  Dead,
  DeadWithSpouse,
  Index,  // plain finite-state-chain state
};

struct State {
  StateLabel label = StateLabel::Active;
  double coord = 0.0;  // onset time or age difference; meaningful iff has_coord()
  int index = 0;       // meaningful iff label == Index

  static State active() { return {StateLabel::Active, 0.0, 0}; }
  static State disabled(double onset) { return {StateLabel::Disabled, onset, 0}; }
  static State dead() { return {StateLabel::Dead, 0.0, 0}; }
  static State dead_with_spouse(double age_difference) {
    return {StateLabel::DeadWithSpouse, age_difference, 0};
  }
  static State indexed(int i) { return {StateLabel::Index, 0.0, i}; }

  bool has_coord() const {
    return label == StateLabel::Disabled || label == StateLabel::DeadWithSpouse;
  }

  // The invariant of the hybrid space: coordinate present exactly for the
  // two coordinate-carrying labels, and a disability onset never lies in the
  // future of the evaluation time.
  bool valid(double current_time) const {
    if (!has_coord()) return true;
    if (!std::isfinite(coord)) return false;
    if (label == StateLabel::Disabled) return coord >= 0.0 && coord <= current_time;
    return true;
  }

  friend bool operator==(const State& a, const State& b) {
    if (a.label != b.label) return false;
    if (a.label == StateLabel::Index) return a.index == b.index;
    if (a.has_coord()) return a.coord == b.coord;
    return true;
  }
  friend bool operator!=(const State& a, const State& b) { return !(a == b); }
};

inline std::string to_string(const State& s) {
  std::ostringstream os;
  switch (s.label) {
    case StateLabel::Active: os << "active"; break;
    case StateLabel::Disabled: os << "disabled(onset=" << s.coord << ")"; break;
    case StateLabel::Dead: os << "dead"; break;
    case StateLabel::DeadWithSpouse: os << "dead_spouse(d=" << s.coord << ")"; break;
    case StateLabel::Index: os << "state" << s.index; break;
  }
  return os.str();
}

}  // namespace mlife
