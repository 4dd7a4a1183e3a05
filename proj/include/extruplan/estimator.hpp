#pragma once

// Material-removal-rate formulas and the time/cost annotation of plans.
//
// Turning formulas work in imperial units (inch, ipr, rpm, fpm -> in^3/min);
// milling, grinding and EDM in metric (mm, mm/min -> mm^3/min). Quantities
// that cross between the two carry a UnitSystem tag.

#include <filesystem>
#include <map>
#include <optional>

#include "extruplan/domain.hpp"

namespace extruplan {

enum class UnitSystem { Metric, Imperial };

inline constexpr double kCubicMmPerCubicInch = 16387.064;
inline constexpr double kSparkRateMin = 2.0;    // mm^3/min
inline constexpr double kSparkRateMax = 400.0;  // mm^3/min

// mm^3 or in^3.
struct Volume {
  double value = 0.0;
  UnitSystem unit = UnitSystem::Metric;
};

// mm^3/min or in^3/min.
struct RemovalRate {
  double value = 0.0;
  UnitSystem unit = UnitSystem::Metric;
};

Volume convert(Volume v, UnitSystem to);
RemovalRate convert(RemovalRate r, UnitSystem to);

// --- Turning (imperial) ----------------------------------------------------

// MRR = pi * D * d * f * N   [in^3/min]
double mrr_turning(double D, double d, double f, double N);
// N = 12 * V / (pi * D)      [rpm], V in fpm
double spindle_speed(double V, double D);
// MRR = 12 * d * f * V       [in^3/min]
double mrr_turning_v(double d, double f, double V);
// MRR = pi * (D_o^2 - D_f^2) / 4 * f * N   [in^3/min]; requires D_o > D_f >= 0
double mrr_straight_turning(double D_o, double D_f, double f, double N);

// --- Milling / grinding (metric) -------------------------------------------

// V = pi * D * N exactly as printed; with D in mm this is mm/min.
double milling_cutting_speed(double D, double N);
// Same speed in m/min.
double milling_cutting_speed_m_per_min(double D, double N);
// f = v / (N * n)   [mm/tooth]
double feed_per_tooth(double v, double N, int n);
// MRR = w * d * v   [mm^3/min]
double mrr_milling(double w, double d, double v);
// MRR = w * d * (f * N * n)
double mrr_milling_from_feed(double w, double d, double f, double N, int n);
// MRR = d * w * v   [mm^3/min]
double mrr_grinding(double d, double w, double v);

// --- EDM --------------------------------------------------------------------

// Linear wire speed [mm/min] from an area rate [mm^2/hr] through a plate [mm].
double wire_edm_linear_speed(double area_rate, double thickness);

// time [min] = volume / rate; units must agree.
double machining_time(Volume volume, RemovalRate rate);

struct TurningParams {
  double d = 0.0;  // depth of cut, in
  double f = 0.0;  // feed, in/rev
  double V = 0.0;  // cutting speed, ft/min
};

// Drilling-family operations use the annular form of straight turning.
struct HoleParams {
  double D_o = 0.0;  // finished diameter, in
  double D_f = 0.0;  // pre-existing diameter, in (0 for solid stock)
  double f = 0.0;    // in/rev
  double N = 0.0;    // rpm
};

struct MillingParams {
  double D = 0.0;  // cutter diameter, mm
  double N = 0.0;  // rpm
  double v = 0.0;  // table feed, mm/min
  int n = 1;       // teeth
  double w = 0.0;  // width of cut, mm
  double d = 0.0;  // depth of cut, mm
};

struct GrindingParams {
  double d = 0.0;  // mm
  double w = 0.0;  // wheel width, mm
  double v = 0.0;  // mm/min
};

struct EdmRates {
  double wire_area_rate = 0.0;  // mm^2/hr
  double spark_rate = 0.0;      // mm^3/min, within [2, 400]
  double thickness = 0.0;       // mm

  void validate() const;
};

struct CostModel {
  std::map<Process, double> hourly_rate;  // currency/hr
  double setup_time = 0.0;                // min per operation

  void validate() const;
};

// Stock to remove for one feature. Volume is shared equally by the
// feature's volume-removing operations; every wire pass traverses cut_length.
struct FeatureStock {
  std::optional<double> removal_volume;  // mm^3
  std::optional<double> cut_length;      // mm
};

struct MachiningSetup {
  std::optional<TurningParams> turning;  // turning and facing
  std::optional<HoleParams> hole;        // drilling family
  std::optional<MillingParams> milling;
  std::optional<GrindingParams> grinding;
  std::optional<EdmRates> edm;
  double heat_treatment_minutes = 240.0;
  std::optional<double> grinding_volume;  // mm^3 per part
  std::map<FeatureKind, FeatureStock> default_stock;
};

struct EstimatorConfig {
  MachiningSetup setup;
  CostModel cost;

  // Every number is {"value": x, "unit": "..."}; units are checked.
  static EstimatorConfig from_json(const Json& j);
  static EstimatorConfig load(const std::filesystem::path& path);
};

// Annotates every operation with time and cost and fills the totals.
// Throws MissingParams when an operation has no usable stock or parameters.
ProcessPlan estimate_plan(const ProcessPlan& plan, const MachiningSetup& setup, const CostModel& cost);

}  // namespace extruplan
