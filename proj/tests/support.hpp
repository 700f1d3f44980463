#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "livedata/formats.hpp"
#include "livedata/node.hpp"
#include "livedata/pipeline.hpp"

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path data_dir() { return fs::path(LIVEDATA_TEST_DATA); }

inline std::string read_data(const std::string& relative) { return livedata::read_file(data_dir() / relative); }

/// Unique scratch directory removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

livedata::NodeDescriptor node_descriptor(const std::string& file);
livedata::TransformConfig load_config(const std::string& dir);

/// The three raw tables of a fixture directory as SREP source datasets owned
/// by `node_id`, named after the config's table sources.
std::vector<livedata::SourceDataset> raw_sources(const std::string& dir, const std::string& node_id);

/// The university walkthrough on node unitn, run in memory.
livedata::PipelineOutput walkthrough();

/// Collects the three raw files of `dir` into `node` and runs transform.
livedata::TransformResult collect_and_transform(livedata::Node& node, const std::string& dir);

/// Node A (unitn, Italian lexicon) and node B (num, Mongolian lexicon) wired
/// through one in-process transport, each registered as the other's peer.
/// Both have run the pipeline; A has distributed S, L, K and G.
struct Mesh {
    TempDir dir;
    std::shared_ptr<livedata::InProcessTransport> transport;
    std::unique_ptr<livedata::Node> a;
    std::unique_ptr<livedata::Node> b;
    livedata::TransformResult a_out;
    livedata::TransformResult b_out;

    explicit Mesh(livedata::DownloadPolicy a_policy = livedata::DownloadPolicy::Automatic);
};

inline const livedata::Timestamp kFixedTime = livedata::parse_timestamp("2024-03-01T12:00:00Z");

}  // namespace testsupport
