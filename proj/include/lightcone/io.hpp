#pragma once

// Persistence: trajectory CSV (header + canonical column order), JSON reports,
// atomic temp+rename writes, and a CSV reader for offline fit replay.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcone/evolve.hpp"

namespace lightcone {

namespace io_detail {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace io_detail

// Writes content to path via a temp file in the same directory plus rename,
// so concurrent readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("io: cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("io: write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

// Columns: t, norm, energy, then observables sorted by name (the map is
// ordered, so iteration order is already canonical). 17 significant digits.
struct TrajectoryTable {
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<double> energies;
    std::map<std::string, std::vector<double>> observables;

    std::size_t rows() const { return times.size(); }

    void check() const {
        if (norms.size() != times.size() || energies.size() != times.size())
            throw std::invalid_argument("trajectory table: column length mismatch");
        for (const auto& [name, col] : observables)
            if (col.size() != times.size())
                throw std::invalid_argument("trajectory table: column '" + name +
                                            "' length mismatch");
    }

    static TrajectoryTable from_record(const TrajectoryRecord& rec) {
        TrajectoryTable tab;
        tab.times = rec.times;
        tab.norms = rec.norm_series;
        tab.energies = rec.energy_series;
        for (const auto& [name, series] : rec.observables) tab.observables[name] = series;
        tab.check();
        return tab;
    }
};

inline std::string trajectory_csv(const TrajectoryTable& tab) {
    tab.check();
    std::ostringstream out;
    out << "t,norm,energy";
    for (const auto& [name, col] : tab.observables) {
        (void)col;
        if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos)
            throw std::invalid_argument("trajectory csv: illegal character in column name '" +
                                        name + "'");
        out << ',' << name;
    }
    out << '\n';
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        out << io_detail::fmt17(tab.times[r]) << ',' << io_detail::fmt17(tab.norms[r]) << ','
            << io_detail::fmt17(tab.energies[r]);
        for (const auto& [name, col] : tab.observables) {
            (void)name;
            out << ',' << io_detail::fmt17(col[r]);
        }
        out << '\n';
    }
    return out.str();
}

inline TrajectoryTable parse_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 3 || header[0] != "t" || header[1] != "norm" || header[2] != "energy")
        throw std::runtime_error("trajectory csv: header must start with t,norm,energy");
    for (std::size_t i = 4; i < header.size(); ++i)
        if (header[i] <= header[i - 1])
            throw std::runtime_error("trajectory csv: observable columns not sorted by name");
    TrajectoryTable tab;
    for (std::size_t i = 3; i < header.size(); ++i) tab.observables[header[i]] = {};
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw std::runtime_error("trajectory csv: bad number '" + cell + "' at line " +
                                         std::to_string(lineno));
            }
            if (used != cell.size())
                throw std::runtime_error("trajectory csv: bad number '" + cell + "' at line " +
                                         std::to_string(lineno));
            row.push_back(v);
        }
        if (row.size() != header.size())
            throw std::runtime_error("trajectory csv: line " + std::to_string(lineno) + " has " +
                                     std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        tab.times.push_back(row[0]);
        tab.norms.push_back(row[1]);
        tab.energies.push_back(row[2]);
        std::size_t c = 3;
        for (auto& [name, col] : tab.observables) {
            (void)name;
            col.push_back(row[c++]);
        }
    }
    if (tab.rows() == 0) throw std::runtime_error("trajectory csv: no data rows");
    return tab;
}

inline TrajectoryTable load_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io: cannot open '" + path.string() + "'");
    return parse_trajectory_csv(in);
}

// JSON reports use a fixed indent so byte-identity across runs reduces to
// value identity; doubles round-trip via nlohmann's shortest representation.
inline void write_json_report(const std::filesystem::path& path, const nlohmann::json& j) {
    atomic_write(path, j.dump(2) + "\n");
}

}  // namespace lightcone
