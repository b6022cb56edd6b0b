#include "ouinv/config.hpp"

#include <cstdlib>
#include <map>
#include <sstream>

#include "ouinv/presets.hpp"

namespace ouinv {

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Verify: return "verify";
        case Experiment::KernelEval: return "kernel-eval";
        case Experiment::SemigroupCheck: return "semigroup-check";
        case Experiment::TubeMeasure: return "tube-measure";
        case Experiment::WeakType: return "weak-type";
        case Experiment::Enhanced: return "enhanced";
        case Experiment::Sharpness: return "sharpness";
        case Experiment::CoveringSim: return "covering-sim";
    }
    return "verify";
}

Experiment experiment_from_name(const std::string& s) {
    if (s == "verify") return Experiment::Verify;
    if (s == "kernel-eval") return Experiment::KernelEval;
    if (s == "semigroup-check") return Experiment::SemigroupCheck;
    if (s == "tube-measure") return Experiment::TubeMeasure;
    if (s == "weak-type") return Experiment::WeakType;
    if (s == "enhanced") return Experiment::Enhanced;
    if (s == "sharpness") return Experiment::Sharpness;
    if (s == "covering-sim") return Experiment::CoveringSim;
    throw UnknownFlag("unknown experiment: " + s);
}

Mat parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream rowStream(text);
    std::string rowText;
    while (std::getline(rowStream, rowText, ';')) {
        std::vector<double> row;
        std::stringstream cellStream(rowText);
        std::string cell;
        while (std::getline(cellStream, cell, ',')) {
            const char* begin = cell.c_str();
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            while (end && *end == ' ') ++end;
            if (end == begin || (end && *end != '\0'))
                throw MalformedMatrix("non-numeric matrix entry: '" + cell + "'");
            row.push_back(v);
        }
        if (row.empty()) throw MalformedMatrix("empty matrix row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw MalformedMatrix("empty matrix");
    const size_t n = rows.size();
    for (const auto& row : rows)
        if (row.size() != n) throw MalformedMatrix("matrix is not square");
    Mat M(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) M(i, j) = rows[i][j];
    return M;
}

Model RunConfig::make_model() const {
    if (inlineModel) return build_model(Q, B);
    return preset_by_name(presetName);
}

std::string RunConfig::model_label() const {
    if (!inlineModel) return presetName;
    std::string s = "inline[Q=";
    for (int i = 0; i < Q.rows(); ++i)
        for (int j = 0; j < Q.cols(); ++j) s += std::to_string(Q(i, j)) + " ";
    s += "B=";
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j) s += std::to_string(B(i, j)) + " ";
    s += "]";
    return s;
}

namespace {

const std::vector<std::string> kKnownKeys = {
    "preset", "Q", "B", "experiment", "seed", "alpha-min", "alpha-max",
    "t-max", "resolution", "A", "m", "out",
};

bool known_key(const std::string& k) {
    for (const auto& known : kKnownKeys)
        if (k == known) return true;
    return false;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw UnknownFlag("value for " + key + " is not a number: '" + v + "'");
    return x;
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& args,
                       const std::optional<std::string>& fileContents) {
    std::map<std::string, std::string> kv;

    if (fileContents) {
        std::stringstream ss(*fileContents);
        std::string line;
        while (std::getline(ss, line)) {
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw UnknownFlag("config file line without '=': " + t);
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (!known_key(key)) throw UnknownFlag("unknown config key: " + key);
            kv[key] = value;
        }
    }

    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0) throw UnknownFlag("expected a --flag, got: " + a);
        std::string key = a.substr(2);
        if (!known_key(key)) throw UnknownFlag("unknown flag: " + a);
        if (i + 1 >= args.size()) throw UnknownFlag("flag " + a + " requires a value");
        kv[key] = args[++i]; // flags override the file
    }

    RunConfig cfg;
    bool hasPreset = kv.count("preset") > 0;
    bool hasQ = kv.count("Q") > 0, hasB = kv.count("B") > 0;
    if (hasPreset && (hasQ || hasB))
        throw ConflictingOptions("give either --preset or an inline --Q/--B pair");
    if (hasQ != hasB)
        throw ConflictingOptions("inline models need both --Q and --B");
    if (hasPreset) {
        cfg.presetName = kv["preset"];
        preset_by_name(cfg.presetName); // validates the name
    } else if (hasQ) {
        cfg.inlineModel = true;
        cfg.Q = parse_matrix(kv["Q"]);
        cfg.B = parse_matrix(kv["B"]);
        if (cfg.Q.rows() != cfg.B.rows())
            throw MalformedMatrix("Q and B have different sizes");
    }
    if (kv.count("experiment")) cfg.experiment = experiment_from_name(kv["experiment"]);
    if (kv.count("seed")) {
        const std::string& v = kv["seed"];
        char* end = nullptr;
        cfg.seed = std::strtoull(v.c_str(), &end, 10);
        if (end == v.c_str() || *end != '\0')
            throw UnknownFlag("value for seed is not an integer: '" + v + "'");
    }
    if (kv.count("alpha-min")) cfg.alphaMin = parse_double("alpha-min", kv["alpha-min"]);
    if (kv.count("alpha-max")) cfg.alphaMax = parse_double("alpha-max", kv["alpha-max"]);
    if (kv.count("t-max")) cfg.tMax = parse_double("t-max", kv["t-max"]);
    if (kv.count("resolution"))
        cfg.resolution = static_cast<int>(parse_double("resolution", kv["resolution"]));
    if (kv.count("A")) cfg.A = parse_double("A", kv["A"]);
    if (kv.count("m")) cfg.m = static_cast<int>(parse_double("m", kv["m"]));
    if (kv.count("out")) cfg.outputPath = kv["out"];

    if (!(cfg.alphaMin > 0.0) || !(cfg.alphaMax >= cfg.alphaMin))
        throw ConflictingOptions("need 0 < alpha-min <= alpha-max");
    if (!(cfg.tMax > 1.0)) throw ConflictingOptions("t-max must exceed 1");
    return cfg;
}

} // namespace ouinv
