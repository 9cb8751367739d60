#pragma once

#include <string>

#include "freeconv/verify.hpp"

namespace freeconv {

/// Parses {"pieces":[{"kind":"atom","x":..,"w":..},{"kind":"uniform","a":..,"b":..,"w":..}]}.
/// Weights must sum to 1 within 1e-9 at parse time; they are renormalized to
/// machine precision before construction. ParseError on any violation.
Measure parse_measure_spec(const std::string& text);
std::string measure_spec_json(const Measure& nu);

struct SupportConfig {
    Measure measure = Measure::point_mass(0.0);
    double sigma = 1.0;
    int resolution = kDefaultGridPerUnit;
};

struct DensityConfig {
    SupportConfig base;
    int grid_points = 1024;
    double pad = 0.5;
};

struct ClassifyConfig {
    Measure measure = Measure::point_mass(0.0);
    double sigma = 1.0;
    SpikeSet spikes{};
    int n = 0; ///< 0: ranks omitted
    int resolution = kDefaultGridPerUnit;
};

SupportConfig parse_support_config(const std::string& text);
DensityConfig parse_density_config(const std::string& text);
ClassifyConfig parse_classify_config(const std::string& text);
VerifyConfig parse_verify_config(const std::string& text);

/// FNV-1a 64 hex digest of the canonical (sorted-key) form of a JSON text.
std::string config_hash_hex(const std::string& json_text);

std::string support_report_json(const FreeConvolution& model, const std::string& config_hash);
std::string classify_report_json(const std::vector<SpikePrediction>& predictions, double sigma,
                                 int n, const std::string& config_hash);

/// Full verification report. The generated-at stamp is the one field excluded
/// from byte-level reproducibility comparisons; pass include_timestamp=false
/// for canonical output.
std::string verify_report_json(const VerifyReport& report, const VerifyConfig& cfg,
                               const std::string& config_hash, bool include_timestamp = true);

} // namespace freeconv
