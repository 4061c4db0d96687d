#pragma once

#include "mcf/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mcf {

// FNV-1a 64-bit content hash, hex-encoded
std::string fnv1a64_hex(const std::string& content);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Run manifest: config echo, artifact version, per-output content hashes and
// wall times. Written next to the outputs as manifest.json.
class Manifest {
public:
    explicit Manifest(std::string command);

    void set_config(const std::string& config_json_text);
    void add_output(const std::string& path, const std::string& content);
    void add_timing(const std::string& label, double seconds);
    std::string dump() const;

private:
    std::string command_;
    std::string config_;
    std::vector<std::string> output_paths_, output_hashes_;
    std::vector<size_t> output_sizes_;
    std::vector<std::string> timing_labels_;
    std::vector<double> timing_seconds_;
};

inline constexpr const char* kArtifactVersion = "0.1.0";

} // namespace mcf
