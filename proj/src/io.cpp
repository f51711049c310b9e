#include "saddleflow/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace saddleflow {

namespace {

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path, std::size_t lineno) {
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        std::string cell = line.substr(pos, comma - pos);
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cell = first == std::string::npos ? std::string() : cell.substr(first, last - first + 1);
        if (cell.empty())
            throw Error(ErrorCode::InvalidData, path.string() + ":" + std::to_string(lineno) + ": empty cell");
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size() || errno == ERANGE)
            throw Error(ErrorCode::InvalidData,
                        path.string() + ":" + std::to_string(lineno) + ": cannot parse '" + cell + "'");
        row.push_back(v);
        pos = comma + 1;
    }
    return row;
}

void write_json(std::ostringstream& out, const nlohmann::json& j, int indent, int depth) {
    const auto pad = [&](int level) {
        if (indent >= 0) out << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ',';
                first = false;
                pad(depth + 1);
                out << nlohmann::json(it.key()).dump() << (indent >= 0 ? ": " : ":");
                write_json(out, it.value(), indent, depth + 1);
            }
            pad(depth);
            out << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(j.begin(), j.end(), [](const auto& e) { return e.is_structured(); });
            out << '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out << (flat && indent >= 0 ? ", " : ",");
                first = false;
                if (!flat) pad(depth + 1);
                write_json(out, e, indent, depth + 1);
            }
            if (!flat) pad(depth);
            out << ']';
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out << (std::isfinite(v) ? format_double(v) : "null");
            return;
        }
        default:
            out << j.dump();
    }
}

}  // namespace

Matrix read_csv(const std::filesystem::path& path, bool header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (header && lineno == 1) continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(parse_row(line, path, lineno));
        if (rows.back().size() != rows.front().size())
            throw Error(ErrorCode::InvalidData, path.string() + ":" + std::to_string(lineno) + ": ragged row");
    }
    if (rows.empty()) throw Error(ErrorCode::InvalidData, path.string() + ": no data rows");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

Dataset load_dataset(const std::filesystem::path& x_path, const std::filesystem::path& y_path, bool header) {
    Matrix x = read_csv(x_path, header);
    const Matrix y = read_csv(y_path, header);
    if (y.cols() != 1) throw Error(ErrorCode::DimensionMismatch, y_path.string() + " must have one column");
    return Dataset(std::move(x), y.col(0));
}

std::string format_double(double v) {
    if (v == 0.0) return std::signbit(v) ? "-0" : "0";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string csv_text(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    if (!columns.empty()) out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
    return out.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    write_text(path, csv_text(columns, rows));
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
    write_csv(path, {}, rows);
}

std::string dump_json(const nlohmann::json& value, int indent) {
    std::ostringstream out;
    write_json(out, value, indent, 0);
    out << '\n';
    return out.str();
}

nlohmann::json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json to_json(const SaddlePath& path) {
    nlohmann::json j;
    j["times"] = path.times;
    j["saddles"] = nlohmann::json::array();
    j["duals"] = nlohmann::json::array();
    for (const auto& b : path.saddles) j["saddles"].push_back(to_json(b));
    for (const auto& s : path.duals) j["duals"].push_back(to_json(s));
    j["loss"] = path.losses;
    j["loops"] = path.loops();
    j["hits"] = nlohmann::json::array();
    for (const auto& h : path.hits) {
        j["hits"].push_back({{"delta", h.delta}, {"coords", h.coords}, {"signs", h.signs}});
    }
    j["warnings"] = path.warnings;
    return j;
}

Vector vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected a JSON array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw Error(ErrorCode::InvalidArgument, "expected a JSON array of numbers");
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidArgument, "expected a JSON array of rows");
    const Vector first = vector_from_json(j[0]);
    Matrix m(static_cast<Index>(j.size()), first.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = vector_from_json(j[i]);
        if (row.size() != first.size()) throw Error(ErrorCode::InvalidArgument, "ragged JSON matrix");
        m.row(static_cast<Index>(i)) = row.transpose();
    }
    return m;
}

std::string trajectory_csv(const FlowTrajectory& traj) {
    const Index d = traj.beta.empty() ? 0 : traj.beta.front().size();
    std::vector<std::string> cols{"t"};
    for (Index i = 0; i < d; ++i) cols.push_back("beta_" + std::to_string(i + 1));
    cols.emplace_back("loss");
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        std::vector<double> row{traj.times[k]};
        for (Index i = 0; i < d; ++i) row.push_back(traj.beta[k](i));
        row.push_back(traj.loss[k]);
        rows.push_back(std::move(row));
    }
    return csv_text(cols, rows);
}

std::string hybrid_csv(const HybridPath& hybrid) {
    const Index d = hybrid.segments.empty() ? 0 : hybrid.segments.front().points.front().size();
    std::vector<std::string> cols{"segment", "kind", "tau_in", "tau_out"};
    for (Index i = 0; i < d; ++i) cols.push_back("beta_" + std::to_string(i + 1));
    std::vector<std::vector<double>> rows;
    for (std::size_t s = 0; s < hybrid.segments.size(); ++s) {
        const auto& seg = hybrid.segments[s];
        for (const auto& p : seg.points) {
            std::vector<double> row{static_cast<double>(s), seg.kind == HybridSegment::Kind::Saddle ? 0.0 : 1.0,
                                    seg.tau_in, seg.tau_out};
            for (Index i = 0; i < d; ++i) row.push_back(p(i));
            rows.push_back(std::move(row));
        }
    }
    return csv_text(cols, rows);
}

}  // namespace saddleflow
