#pragma once

// Command-line front end: synth | image | profile | verify | ingest.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "osm/forward.hpp"

namespace osm::cli {

struct RunConfig {
    std::string command;

    // geometry
    int M = 36;
    int N = 49;
    double A = 0.72;
    double B = 0.76;

    // imaging grid, [-extent, extent]^2
    int nx = 201;
    int ny = 201;
    double extent = 0.1;

    std::vector<double> freq_ghz;

    // synth
    std::string case_spec;  // case1..case4 or a JSON case file
    std::vector<SmallObject> objects;
    std::optional<double> noise_db;
    std::uint64_t seed = 0;
    std::string model = "born";

    // image
    std::vector<std::string> data;
    std::string mode = "multi";  // single:<m> | multi | fsm:<1|2|3>
    std::string variant = "g";   // g | f | h
    double cx = 1.0;
    double cy = 0.0;

    // profile
    std::string kind = "msm";
    int points = 2001;
    double xmax = 0.1;

    // verify
    std::string suite = "all";

    // ingest
    std::string file;
    std::string columns;
    double snap_deg = 0.5;

    std::string out = ".";
    unsigned threads = 0;
};

// Objects from a preset name (case1..case4) or a JSON file
//   {"name": ..., "objects": [{"center": [x, y], "radius": r, "mu_rel": m}, ...]}
std::vector<SmallObject> load_case(const std::string& spec);
std::vector<SmallObject> parse_case_json(const nlohmann::json& j);

// Full resolved configuration, including the argument list that re-runs it.
nlohmann::json config_json(const RunConfig& cfg);
std::vector<std::string> rerun_args(const RunConfig& cfg);

int cmd_synth(const RunConfig& cfg, std::ostream& log);
int cmd_image(const RunConfig& cfg, std::ostream& log);
int cmd_profile(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_ingest(const RunConfig& cfg, std::ostream& log);

// Parses argv and dispatches. Returns the process exit code; errors are
// reported on `err`.
int run(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

// Dataset file name used for a frequency, e.g. "dataset_8GHz.txt".
std::string dataset_filename(double freq_ghz);

}  // namespace osm::cli
