#include "mcf/io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcf {

std::string fnv1a64_hex(const std::string& content)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Manifest::Manifest(std::string command) : command_(std::move(command)) {}

void Manifest::set_config(const std::string& config_json_text)
{
    config_ = config_json_text;
}

void Manifest::add_output(const std::string& path, const std::string& content)
{
    output_paths_.push_back(path);
    output_hashes_.push_back(fnv1a64_hex(content));
    output_sizes_.push_back(content.size());
}

void Manifest::add_timing(const std::string& label, double seconds)
{
    timing_labels_.push_back(label);
    timing_seconds_.push_back(seconds);
}

std::string Manifest::dump() const
{
    nlohmann::json j;
    j["command"] = command_;
    j["version"] = kArtifactVersion;
    if (!config_.empty())
        j["config"] = nlohmann::json::parse(config_);
    auto outputs = nlohmann::json::array();
    for (size_t i = 0; i < output_paths_.size(); ++i)
        outputs.push_back({{"path", output_paths_[i]},
                           {"bytes", output_sizes_[i]},
                           {"fnv1a64", output_hashes_[i]}});
    j["outputs"] = outputs;
    auto timings = nlohmann::json::object();
    for (size_t i = 0; i < timing_labels_.size(); ++i)
        timings[timing_labels_[i]] = timing_seconds_[i];
    j["timings"] = timings;
    return j.dump(2) + "\n";
}

} // namespace mcf
