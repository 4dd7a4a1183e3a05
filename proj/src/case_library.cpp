#include "extruplan/case_library.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace extruplan {

namespace {

// Platform-independent draws on top of mt19937_64.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 rng_;
};

double draw_in_bin(Draw& draw, const BinTable& bins, std::size_t index, bool jitter) {
  if (!jitter) return bins.representative_of(index);
  const Interval& iv = bins.intervals[index];
  // Keep clear of the edges so the value stays in the bin after rounding.
  return iv.lo + iv.width() * (0.05 + 0.9 * draw.unit());
}

double draw_numeric(Draw& draw, const Segment& seg, bool jitter, std::size_t first_bin = 0) {
  const std::size_t n = seg.bins.intervals.size() - first_bin;
  return draw_in_bin(draw, seg.bins, first_bin + draw.index(n), jitter);
}

std::size_t first_bin_at_least(const Segment& seg, double value) {
  for (std::size_t i = 0; i < seg.bins.intervals.size(); ++i)
    if (seg.bins.intervals[i].lo >= value) return i;
  return seg.bins.intervals.size();
}

ProfileSpec sample_profile(Draw& draw, const EncodingConfig& cfg, const KnowledgeBase& kb, bool jitter) {
  ProfileSpec p;
  p.profile_type = kAllProfileTypes[draw.index(kAllProfileTypes.size())];
  p.shape_class = static_cast<int>(draw.index(cfg.shape_catalog.size()));
  p.wall_thickness = draw_numeric(draw, cfg.input(segment::kThickness), jitter);
  p.width = draw_numeric(draw, cfg.input(segment::kWidth), jitter);
  p.height = draw_numeric(draw, cfg.input(segment::kHeight), jitter);
  if (draw.chance(0.5)) {
    const Segment& ccd = cfg.input(segment::kCcd);
    const std::size_t first = first_bin_at_least(ccd, std::max(p.width, p.height));
    if (first < ccd.bins.intervals.size()) p.ccd = draw_numeric(draw, ccd, jitter, first);
  }
  p.cross_section_area = draw_numeric(draw, cfg.input(segment::kArea), jitter);
  if (draw.chance(0.75)) p.press_capacity = kAllPressCapacities[draw.index(kAllPressCapacities.size())];
  p.perimeter = draw_numeric(draw, cfg.input(segment::kPerimeter), jitter);
  if (p.profile_type != ProfileType::Solid && draw.chance(0.7)) {
    const Segment& ext = cfg.input(segment::kExternalPerimeter);
    std::size_t usable = 0;
    while (usable < ext.bins.intervals.size() && ext.bins.intervals[usable].hi <= p.perimeter) ++usable;
    if (usable > 0) p.external_perimeter = draw_in_bin(draw, ext.bins, draw.index(usable), jitter);
  }
  p.tongue_ratio = draw_numeric(draw, cfg.input(segment::kTongueRatio), jitter);
  if (draw.chance(0.3)) {
    // Quote the ratio the knowledge base would derive, at its bin representative.
    const Segment& er = cfg.input(segment::kExtrusionRatio);
    const double derived = select_extrusion_ratio(p, select_num_orifices(p, kb), kb);
    try {
      p.extrusion_ratio = er.bins.representative_of(bin_lookup(derived, er.bins.intervals, er.name));
    } catch (const BinOutOfRange&) {
      p.extrusion_ratio.reset();
    }
  }
  return p;
}

CaseRecord make_case(std::string id, const ProfileSpec& profile, const KnowledgeBase& kb, CaseProvenance provenance,
                     const std::string& created) {
  CaseRecord rec;
  rec.case_id = std::move(id);
  rec.profile = profile;
  rec.design = construct_design(profile, kb);
  rec.plan = derive_plan(rec.design, kb);
  rec.provenance = provenance;
  rec.created = created;
  return rec;
}

std::string synthetic_id(std::size_t i) {
  std::string digits = std::to_string(i);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "syn-" + digits;
}

}  // namespace

std::vector<std::string> validate_case(const CaseRecord& record) {
  std::vector<std::string> out;
  if (record.case_id.empty()) out.emplace_back("case_id must not be empty");
  for (const auto& p : validate_profile(record.profile)) out.push_back("profile: " + p);
  for (const auto& p : validate_design(record.design)) out.push_back("design: " + p);
  if (!plan_features_match_design(record.plan, record.design))
    out.emplace_back("plan lists features that are not in the design");
  return out;
}

void Library::add(CaseRecord record) {
  if (auto bad = validate_case(record); !bad.empty())
    throw SchemaMismatch("case '" + record.case_id + "' is invalid: " + bad.front());
  if (index_.count(record.case_id) != 0) throw SchemaMismatch("duplicate case_id '" + record.case_id + "'");
  index_.emplace(record.case_id, records_.size());
  records_.push_back(std::move(record));
}

const CaseRecord* Library::find(const std::string& case_id) const {
  auto it = index_.find(case_id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

Json library_to_json(const Library& lib) {
  return Json{{"metadata",
               {{"codec_version", lib.metadata().codec_version}, {"kb_fingerprint", lib.metadata().kb_fingerprint}}},
              {"cases", lib.records()}};
}

Library library_from_json(const Json& j) {
  try {
    LibraryMetadata meta;
    meta.codec_version = j.at("metadata").at("codec_version").get<std::string>();
    meta.kb_fingerprint = j.at("metadata").value("kb_fingerprint", std::string{});
    Library lib(meta);
    for (const auto& c : j.at("cases")) lib.add(c.get<CaseRecord>());
    return lib;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch(std::string("malformed library: ") + e.what());
  } catch (const InvalidInput& e) {
    throw SchemaMismatch(std::string("malformed library: ") + e.what());
  }
}

void save_library(const Library& lib, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write library " + path.string());
  out << library_to_json(lib).dump(1) << "\n";
  if (!out) throw IoError("failed writing library " + path.string());
}

Library load_library(const std::filesystem::path& path, const EncodingConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open library " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaMismatch(path.string() + ": " + e.what());
  }
  Library lib = library_from_json(j);
  if (lib.metadata().codec_version != cfg.codec_version)
    throw VersionMismatch(cfg.codec_version, lib.metadata().codec_version);
  return lib;
}

std::filesystem::path library_file(const std::filesystem::path& cases_dir) { return cases_dir / "cases.json"; }

std::size_t hamming_distance(const InputVector& a, const InputVector& b) {
  std::size_t d = 0;
  for (std::size_t c = 1; c <= kInputNodes; ++c) d += a.at(c) != b.at(c) ? 1 : 0;
  return d;
}

std::vector<Neighbor> nearest_neighbors(const InputVector& query, const Library& lib, const EncodingConfig& cfg,
                                        std::size_t k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (lib.empty()) throw EmptyLibrary();
  std::vector<Neighbor> all;
  all.reserve(lib.size());
  for (const auto& rec : lib.records())
    all.push_back({rec.case_id, hamming_distance(query, encode_profile(rec.profile, cfg))});
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.case_id < b.case_id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

ProfileSpec case_study_profile() {
  ProfileSpec p;
  p.profile_type = ProfileType::Hollow;
  p.shape_class = 5;  // rectangular
  p.wall_thickness = 1.5;
  p.width = 50.0;
  p.height = 14.7;
  p.cross_section_area = 3.4;
  p.perimeter = 30.37;
  p.external_perimeter = 19.24;
  p.tongue_ratio = 1.4;
  return p;
}

std::vector<CaseRecord> generate_synthetic_cases(std::size_t n, std::uint64_t seed, const EncodingConfig& cfg,
                                                 const KnowledgeBase& kb, const GeneratorOptions& options) {
  if (n < 1) throw InvalidInput("n must be >= 1");
  std::vector<CaseRecord> out;
  out.reserve(n);
  out.push_back(make_case(kCaseStudyId, case_study_profile(), kb, CaseProvenance::Industrial, options.created));

  Draw draw(seed);
  std::size_t next_id = 1;
  while (out.size() < n) {
    const ProfileSpec profile = sample_profile(draw, cfg, kb, options.jitter);
    CaseRecord rec = make_case(synthetic_id(next_id), profile, kb, CaseProvenance::Synthetic, options.created);
    try {
      encode_profile(rec.profile, cfg);
      encode_design(rec.design, cfg);
    } catch (const BinOutOfRange&) {
      continue;  // outside the codec's range; draw again
    }
    ++next_id;
    out.push_back(std::move(rec));
  }
  return out;
}

Library make_library(std::vector<CaseRecord> records, const EncodingConfig& cfg, const KnowledgeBase& kb) {
  Library lib({cfg.codec_version, kb.fingerprint()});
  for (auto& r : records) lib.add(std::move(r));
  return lib;
}

std::vector<TrainingPair> build_dataset(const Library& lib, const EncodingConfig& cfg) {
  std::vector<TrainingPair> out;
  out.reserve(lib.size());
  for (const auto& rec : lib.records()) {
    try {
      out.push_back({encode_profile(rec.profile, cfg), encode_design(rec.design, cfg)});
    } catch (const BinOutOfRange& e) {
      throw BinOutOfRange(e, "case '" + rec.case_id + "'");
    }
  }
  return out;
}

}  // namespace extruplan
