#include "extruplan/estimator.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace extruplan {

namespace {

using std::numbers::pi;

void require_positive(const char* name, double v) {
  if (!(std::isfinite(v) && v > 0.0)) throw NonPositiveInput(name, v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Reads {"value": x, "unit": u} and checks u.
double quantity(const Json& j, const char* key, const char* unit, std::vector<std::string>& problems,
                const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    problems.push_back(where + "." + key + " is missing");
    return 0.0;
  }
  if (!it->is_object() || !it->contains("value") || !it->contains("unit")) {
    problems.push_back(where + "." + key + " must be {\"value\": number, \"unit\": \"" + unit + "\"}");
    return 0.0;
  }
  const auto u = it->at("unit").get<std::string>();
  if (u != unit) problems.push_back(where + "." + key + " has unit \"" + u + "\", expected \"" + unit + "\"");
  return it->at("value").get<double>();
}

bool volume_removing(Process p) { return p != Process::EdmWire && p != Process::HeatTreatment; }

}  // namespace

Volume convert(Volume v, UnitSystem to) {
  if (v.unit == to) return v;
  return {to == UnitSystem::Metric ? v.value * kCubicMmPerCubicInch : v.value / kCubicMmPerCubicInch, to};
}

RemovalRate convert(RemovalRate r, UnitSystem to) {
  if (r.unit == to) return r;
  return {to == UnitSystem::Metric ? r.value * kCubicMmPerCubicInch : r.value / kCubicMmPerCubicInch, to};
}

double mrr_turning(double D, double d, double f, double N) {
  require_positive("D", D);
  require_positive("d", d);
  require_positive("f", f);
  require_positive("N", N);
  return pi * D * d * f * N;
}

double spindle_speed(double V, double D) {
  require_positive("V", V);
  require_positive("D", D);
  return 12.0 * V / (pi * D);
}

double mrr_turning_v(double d, double f, double V) {
  require_positive("d", d);
  require_positive("f", f);
  require_positive("V", V);
  return 12.0 * d * f * V;
}

double mrr_straight_turning(double D_o, double D_f, double f, double N) {
  require_positive("D_o", D_o);
  if (!(std::isfinite(D_f) && D_f >= 0.0)) throw NonPositiveInput("D_f", D_f);
  if (!(D_o > D_f)) throw InvalidInput("straight turning requires D_o > D_f, got D_o=" + fmt(D_o) + " D_f=" + fmt(D_f));
  require_positive("f", f);
  require_positive("N", N);
  return pi * (D_o * D_o - D_f * D_f) / 4.0 * f * N;
}

double milling_cutting_speed(double D, double N) {
  require_positive("D", D);
  require_positive("N", N);
  return pi * D * N;
}

double milling_cutting_speed_m_per_min(double D, double N) { return milling_cutting_speed(D, N) / 1000.0; }

double feed_per_tooth(double v, double N, int n) {
  require_positive("v", v);
  require_positive("N", N);
  if (n < 1) throw NonPositiveInput("n", n);
  return v / (N * n);
}

double mrr_milling(double w, double d, double v) {
  require_positive("w", w);
  require_positive("d", d);
  require_positive("v", v);
  return w * d * v;
}

double mrr_milling_from_feed(double w, double d, double f, double N, int n) {
  require_positive("f", f);
  require_positive("N", N);
  if (n < 1) throw NonPositiveInput("n", n);
  return mrr_milling(w, d, f * N * n);
}

double mrr_grinding(double d, double w, double v) {
  require_positive("d", d);
  require_positive("w", w);
  require_positive("v", v);
  return d * w * v;
}

double wire_edm_linear_speed(double area_rate, double thickness) {
  require_positive("area_rate", area_rate);
  require_positive("thickness", thickness);
  return area_rate / thickness / 60.0;
}

double machining_time(Volume volume, RemovalRate rate) {
  if (volume.unit != rate.unit)
    throw UnitMismatch(std::string("volume in ") + (volume.unit == UnitSystem::Metric ? "mm^3" : "in^3") +
                       " but rate in " + (rate.unit == UnitSystem::Metric ? "mm^3/min" : "in^3/min"));
  require_positive("volume", volume.value);
  require_positive("mrr", rate.value);
  return volume.value / rate.value;
}

void EdmRates::validate() const {
  require_positive("wire_area_rate", wire_area_rate);
  require_positive("thickness", thickness);
  if (!(spark_rate >= kSparkRateMin && spark_rate <= kSparkRateMax))
    throw InvalidInput("EDM spark rate " + fmt(spark_rate) + " mm^3/min is outside [2, 400]");
}

void CostModel::validate() const {
  for (const auto& [process, rate] : hourly_rate)
    if (!(std::isfinite(rate) && rate >= 0.0))
      throw InvalidInput("hourly rate for " + std::string(to_string(process)) + " must be >= 0");
  if (!(std::isfinite(setup_time) && setup_time >= 0.0)) throw InvalidInput("setup time must be >= 0");
}

EstimatorConfig EstimatorConfig::from_json(const Json& j) {
  std::vector<std::string> problems;
  EstimatorConfig cfg;
  auto& s = cfg.setup;
  try {
    cfg.cost.setup_time = quantity(j, "setup_time", "min", problems, "estimator");
    s.heat_treatment_minutes = quantity(j, "heat_treatment_duration", "min", problems, "estimator");
    for (auto p : kAllProcesses)
      if (j.contains("hourly_rate"))
        cfg.cost.hourly_rate[p] =
            quantity(j.at("hourly_rate"), std::string(to_string(p)).c_str(), "currency/hr", problems,
                     "estimator.hourly_rate");
      else
        problems.emplace_back("estimator.hourly_rate is missing");
    if (auto t = j.find("turning"); t != j.end())
      s.turning = TurningParams{quantity(*t, "d", "in", problems, "turning"),
                                quantity(*t, "f", "in/rev", problems, "turning"),
                                quantity(*t, "V", "ft/min", problems, "turning")};
    if (auto h = j.find("hole"); h != j.end())
      s.hole = HoleParams{quantity(*h, "D_o", "in", problems, "hole"), quantity(*h, "D_f", "in", problems, "hole"),
                          quantity(*h, "f", "in/rev", problems, "hole"), quantity(*h, "N", "rpm", problems, "hole")};
    if (auto m = j.find("milling"); m != j.end())
      s.milling = MillingParams{quantity(*m, "D", "mm", problems, "milling"),
                                quantity(*m, "N", "rpm", problems, "milling"),
                                quantity(*m, "v", "mm/min", problems, "milling"),
                                static_cast<int>(quantity(*m, "n", "teeth", problems, "milling")),
                                quantity(*m, "w", "mm", problems, "milling"),
                                quantity(*m, "d", "mm", problems, "milling")};
    if (auto g = j.find("grinding"); g != j.end())
      s.grinding = GrindingParams{quantity(*g, "d", "mm", problems, "grinding"),
                                  quantity(*g, "w", "mm", problems, "grinding"),
                                  quantity(*g, "v", "mm/min", problems, "grinding")};
    if (auto e = j.find("edm"); e != j.end())
      s.edm = EdmRates{quantity(*e, "wire_area_rate", "mm^2/hr", problems, "edm"),
                       quantity(*e, "spark_rate", "mm^3/min", problems, "edm"),
                       quantity(*e, "thickness", "mm", problems, "edm")};
    if (j.contains("grinding_volume"))
      s.grinding_volume = quantity(j, "grinding_volume", "mm^3", problems, "estimator");
    if (auto ds = j.find("default_stock"); ds != j.end()) {
      for (const auto& [name, stock] : ds->items()) {
        FeatureStock fs;
        const std::string where = "default_stock." + name;
        if (stock.contains("removal_volume")) fs.removal_volume = quantity(stock, "removal_volume", "mm^3", problems, where);
        if (stock.contains("cut_length")) fs.cut_length = quantity(stock, "cut_length", "mm", problems, where);
        try {
          s.default_stock[parse_feature_kind(name)] = fs;
        } catch (const Error& e) {
          problems.push_back(where + ": " + e.what());
        }
      }
    }
    if (s.edm) {
      try {
        s.edm->validate();
      } catch (const Error& e) {
        problems.push_back(std::string("edm: ") + e.what());
      }
    }
    try {
      cfg.cost.validate();
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("estimator: ") + e.what());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

EstimatorConfig EstimatorConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open estimator config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  if (auto it = j.find("estimator"); it != j.end()) return from_json(*it);
  return from_json(j);
}

ProcessPlan estimate_plan(const ProcessPlan& plan, const MachiningSetup& setup, const CostModel& cost) {
  cost.validate();
  if (setup.edm) setup.edm->validate();

  ProcessPlan out = plan;
  out.total_time = 0.0;
  out.total_cost = 0.0;
  for (auto& part : out.parts) {
    for (auto& step : part.steps) {
      FeatureStock stock;
      if (step.feature) {
        if (auto it = setup.default_stock.find(step.feature->kind); it != setup.default_stock.end()) stock = it->second;
        if (step.feature->attributes.removal_volume) stock.removal_volume = step.feature->attributes.removal_volume;
      } else {
        stock.removal_volume = setup.grinding_volume;
      }
      int sharers = 0;
      for (const auto& op : step.operations) sharers += volume_removing(op.process()) ? 1 : 0;

      for (auto& op : step.operations) {
        const std::string name(to_string(op.operation));
        const Process process = op.process();
        auto share = [&]() -> Volume {
          if (!stock.removal_volume) throw MissingParams(name + " (no removal volume)");
          return {*stock.removal_volume / sharers, UnitSystem::Metric};
        };
        double minutes = 0.0;
        switch (process) {
          case Process::Turning:
          case Process::Facing: {
            if (!setup.turning) throw MissingParams(name);
            const auto& t = *setup.turning;
            minutes = machining_time(convert(share(), UnitSystem::Imperial),
                                     {mrr_turning_v(t.d, t.f, t.V), UnitSystem::Imperial});
            break;
          }
          case Process::Drilling: {
            if (!setup.hole) throw MissingParams(name);
            const auto& h = *setup.hole;
            minutes = machining_time(convert(share(), UnitSystem::Imperial),
                                     {mrr_straight_turning(h.D_o, h.D_f, h.f, h.N), UnitSystem::Imperial});
            break;
          }
          case Process::Milling: {
            if (!setup.milling) throw MissingParams(name);
            const auto& m = *setup.milling;
            minutes = machining_time(share(), {mrr_milling(m.w, m.d, m.v), UnitSystem::Metric});
            break;
          }
          case Process::Grinding: {
            if (!setup.grinding) throw MissingParams(name);
            const auto& g = *setup.grinding;
            minutes = machining_time(share(), {mrr_grinding(g.d, g.w, g.v), UnitSystem::Metric});
            break;
          }
          case Process::HeatTreatment:
            minutes = setup.heat_treatment_minutes;
            break;
          case Process::EdmSpark:
            if (!setup.edm) throw MissingParams(name);
            minutes = machining_time(share(), {setup.edm->spark_rate, UnitSystem::Metric});
            break;
          case Process::EdmWire:
            if (!setup.edm) throw MissingParams(name);
            if (!stock.cut_length) throw MissingParams(name + " (no cut length)");
            require_positive("cut_length", *stock.cut_length);
            minutes = *stock.cut_length / wire_edm_linear_speed(setup.edm->wire_area_rate, setup.edm->thickness);
            break;
        }
        auto rate = cost.hourly_rate.find(process);
        if (rate == cost.hourly_rate.end()) throw MissingParams(name + " (no hourly rate)");
        op.estimated_time = minutes;
        op.estimated_cost = (minutes + cost.setup_time) / 60.0 * rate->second;
        out.total_time += minutes;
        out.total_cost += *op.estimated_cost;
      }
    }
  }
  return out;
}

}  // namespace extruplan
