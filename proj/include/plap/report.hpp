#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "plap/csv.hpp"
#include "plap/error.hpp"

namespace plap {

/// How a check compares measured against target:
///   Abs   |measured - target| <= tolerance
///   Upper measured <= target + tolerance
///   Lower measured >= target - tolerance
enum class Comparison { Abs, Upper, Lower };

constexpr const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::Abs: return "abs";
    case Comparison::Upper: return "upper";
    case Comparison::Lower: return "lower";
  }
  return "?";
}

struct CheckRow {
  std::string name;
  Comparison comparison = Comparison::Abs;
  double target = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

inline bool evaluate(Comparison c, double target, double measured, double tol) {
  if (!std::isfinite(measured)) return false;
  switch (c) {
    case Comparison::Abs: return std::abs(measured - target) <= tol;
    case Comparison::Upper: return measured <= target + tol;
    case Comparison::Lower: return measured >= target - tol;
  }
  return false;
}

inline CheckRow check(std::string name, Comparison c, double target, double measured, double tol,
                      std::string note = {}) {
  CheckRow row{std::move(name), c, target, measured, tol, false, std::move(note)};
  row.pass = evaluate(c, target, measured, tol);
  return row;
}

/// A check that could not be evaluated because a module raised an error.
inline CheckRow failed_check(std::string name, const std::string& message) {
  CheckRow row{std::move(name), Comparison::Abs, 0.0, std::nan(""), 0.0, false, message};
  return row;
}

struct ExperimentReport {
  std::string campaign;
  std::vector<std::string> metadata;  // emitted as '#' lines
  std::vector<CheckRow> rows;
  std::vector<std::pair<std::string, double>> durations;  // seconds; kept out of the CSV

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const CheckRow& r) { return !r.pass; }));
  }

  void write_csv(const std::string& path) const {
    csv::Writer w(path);
    w.comment("campaign " + campaign);
    for (const auto& m : metadata) w.comment(m);
    w.header({"check", "comparison", "target", "measured", "tolerance", "pass", "note"});
    for (const auto& r : rows) {
      w.raw_row({r.name, to_string(r.comparison), csv::number(r.target), csv::number(r.measured),
                 csv::number(r.tolerance), r.pass ? "1" : "0", sanitize(r.note)});
    }
  }

  void write_summary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::Io, "cannot open " + path + " for writing");
    out << "campaign " << campaign << "\n";
    out << "checks " << rows.size() << " failures " << failures() << "\n";
    for (const auto& r : rows) out << (r.pass ? "PASS " : "FAIL ") << r.name << "\n";
    for (const auto& [step, sec] : durations) out << "time " << step << " " << csv::number(sec) << " s\n";
  }

 private:
  // notes are free text; keep the CSV single-column-safe
  static std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '"', '\'');
    return s;
  }
};

}  // namespace plap
