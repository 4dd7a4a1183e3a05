#pragma once

// Case library: persisted CaseRecords, Hamming nearest-neighbour retrieval,
// the seeded synthetic corpus generator and the training-set builder.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "extruplan/codec.hpp"
#include "extruplan/knowledge_base.hpp"

namespace extruplan {

inline constexpr const char* kCaseStudyId = "industrial-case-study";
inline constexpr const char* kSyntheticTimestamp = "2000-01-01T00:00:00Z";

struct LibraryMetadata {
  std::string codec_version;
  std::string kb_fingerprint;

  bool operator==(const LibraryMetadata&) const = default;
};

class Library {
 public:
  Library() = default;
  explicit Library(LibraryMetadata metadata) : metadata_(std::move(metadata)) {}

  // Validates the record; throws SchemaMismatch on duplicate id or invalid content.
  void add(CaseRecord record);

  const LibraryMetadata& metadata() const { return metadata_; }
  const std::vector<CaseRecord>& records() const { return records_; }
  const CaseRecord* find(const std::string& case_id) const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  bool operator==(const Library& other) const {
    return metadata_ == other.metadata_ && records_ == other.records_;
  }

 private:
  LibraryMetadata metadata_;
  std::vector<CaseRecord> records_;
  std::map<std::string, std::size_t> index_;
};

// Problems with a record on its own: profile, design and plan/design consistency.
std::vector<std::string> validate_case(const CaseRecord& record);

Json library_to_json(const Library& lib);
Library library_from_json(const Json& j);

void save_library(const Library& lib, const std::filesystem::path& path);
// Rejects a codec_version that differs from cfg's with VersionMismatch.
Library load_library(const std::filesystem::path& path, const EncodingConfig& cfg);
// The library file inside a cases directory.
std::filesystem::path library_file(const std::filesystem::path& cases_dir);

struct Neighbor {
  std::string case_id;
  std::size_t distance = 0;

  bool operator==(const Neighbor&) const = default;
};

std::size_t hamming_distance(const InputVector& a, const InputVector& b);

// The k closest cases by Hamming distance of encoded profiles; ties by case_id.
std::vector<Neighbor> nearest_neighbors(const InputVector& query, const Library& lib, const EncodingConfig& cfg,
                                        std::size_t k);

struct GeneratorOptions {
  bool jitter = false;  // draw numeric attributes anywhere inside their bin
  std::string created = kSyntheticTimestamp;
};

// The case-study profile (hollow, rectangular, 3.4 cm^2, 50 x 14.7 mm).
ProfileSpec case_study_profile();

// n records: the case study first, then n - 1 seeded synthetic cases
// labelled by the knowledge base.
std::vector<CaseRecord> generate_synthetic_cases(std::size_t n, std::uint64_t seed, const EncodingConfig& cfg,
                                                 const KnowledgeBase& kb, const GeneratorOptions& options = {});

Library make_library(std::vector<CaseRecord> records, const EncodingConfig& cfg, const KnowledgeBase& kb);

struct TrainingPair {
  InputVector input;
  OutputVector output;
};

// Pairs in library order; BinOutOfRange names the offending case.
std::vector<TrainingPair> build_dataset(const Library& lib, const EncodingConfig& cfg);

}  // namespace extruplan
