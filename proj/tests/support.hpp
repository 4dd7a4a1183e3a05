#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "extruplan/planner.hpp"

namespace testing_support {

inline std::filesystem::path source_dir() { return EXTRUPLAN_SOURCE_DIR; }
inline std::filesystem::path config_path() { return source_dir() / "config" / "extruplan.json"; }
inline std::filesystem::path kb_path() { return source_dir() / "config" / "kb.json"; }

inline const extruplan::AppConfig& app() {
  static const extruplan::AppConfig cfg = extruplan::load_app_config(config_path());
  return cfg;
}
inline const extruplan::EncodingConfig& codec() { return app().codec; }
inline const extruplan::KnowledgeBase& kb() { return app().kb; }
inline const extruplan::EstimatorConfig& estimator() { return app().estimator; }

inline extruplan::Json codec_json() {
  std::ifstream in(config_path());
  return extruplan::Json::parse(in).at("codec");
}

inline extruplan::Json kb_json() {
  std::ifstream in(kb_path());
  return extruplan::Json::parse(in);
}

// Solid heat-sink profile with ccd, no press, no ER and no external perimeter.
inline extruplan::ProfileSpec heat_sink_profile() {
  extruplan::ProfileSpec p;
  p.profile_type = extruplan::ProfileType::Solid;
  p.shape_class = 5;
  p.wall_thickness = 2.3;
  p.width = 24.0;
  p.height = 15.3;
  p.ccd = 28.5;
  p.cross_section_area = 1.7;
  p.perimeter = 20.32;
  p.tongue_ratio = 4.0;
  return p;
}

// Scratch directory unique to the calling test.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("extruplan-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
