#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nib/neighborhoods.hpp"
#include "nib/oracle.hpp"
#include "nib/percolation.hpp"
#include "nib/spectra.hpp"

namespace nib {

inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a over the bytes of `data`.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);
/// Current UTC time as ISO-8601 with seconds.
std::string utc_timestamp();

struct RunManifest {
    std::string command;
    std::string input_path;
    std::string input_hash;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::string started;
    std::string finished;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json classing_to_json(const NeighborhoodSystem& system, const EquivalenceClassing& classing);

nlohmann::json to_json(const PercConfig& config);
nlohmann::json to_json(const PercolationReport& report);
/// Rows "node,s,pi" for s = 1..s_max.
void write_percolation_csv(std::ostream& out, const PercolationReport& report);

nlohmann::json to_json(const SpectralConfig& config);
/// "x,rho" with 17 significant digits.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);
nlohmann::json spectrum_metadata(const SpectrumReport& report);
/// Reads "x,rho" rows back; the header line is required.
std::vector<std::pair<double, double>> read_spectrum_csv(std::istream& in);

nlohmann::json to_json(const ExactPercolation& exact);
nlohmann::json to_json(const McPercolation& mc);

/// 17 significant digits, shortest form that round-trips.
std::string format_double(double value);

}  // namespace nib
