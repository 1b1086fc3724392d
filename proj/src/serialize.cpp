#include "mixlearn/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "mixlearn/errors.hpp"

namespace mixlearn {

using nlohmann::json;

std::string format_double(double x) {
    if (!std::isfinite(x)) throw_numeric("cannot serialize a non-finite number");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

void append_json_string(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

template <typename Seq>
void append_number_array(std::string& out, const Seq& values) {
    out += '[';
    for (std::size_t i = 0; i < static_cast<std::size_t>(values.size()); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    out += ']';
}

void append_density(std::string& out, const Density& d) {
    out += "{\"type\":";
    switch (d.kind()) {
        case Density::Kind::gaussian: {
            out += "\"gaussian\",\"mean\":";
            append_number_array(out, d.mean());
            out += ",\"cov\":[";
            const auto& cov = d.cov();
            for (Eigen::Index r = 0; r < cov.rows(); ++r) {
                if (r) out += ',';
                append_number_array(out, cov.row(r));
            }
            out += ']';
            break;
        }
        case Density::Kind::axis_aligned_gaussian: {
            out += "\"axis_aligned_gaussian\",\"mean\":";
            append_number_array(out, d.mean());
            out += ",\"var\":";
            append_number_array(out, d.var());
            break;
        }
        case Density::Kind::mixture: {
            out += "\"mixture\",\"weights\":";
            append_number_array(out, d.weights());
            out += ",\"components\":[";
            const auto& comps = d.components();
            for (std::size_t i = 0; i < comps.size(); ++i) {
                if (i) out += ',';
                append_density(out, comps[i]);
            }
            out += ']';
            break;
        }
        case Density::Kind::histogram1d: {
            out += "\"histogram1d\",\"left\":";
            out += format_double(d.left());
            out += ",\"right\":";
            out += format_double(d.right());
            out += ",\"masses\":";
            append_number_array(out, d.masses());
            break;
        }
    }
    if (!d.label().empty()) {
        out += ",\"label\":";
        append_json_string(out, d.label());
    }
    out += '}';
}

const json& require_field(const json& j, const char* name, const std::string& path) {
    auto it = j.find(name);
    if (it == j.end()) throw_input(path + " is missing field \"" + name + "\"");
    return *it;
}

double parse_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw_input(path + " must be a number");
    return j.get<double>();
}

std::vector<double> parse_number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw_input(path + " must be a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
    const auto values = parse_number_list(j, path);
    return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                             static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw_input(path + " must be a nonempty array of rows");
    const std::size_t rows = j.size();
    Eigen::MatrixXd m;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = parse_number_list(j[r], path + "[" + std::to_string(r) + "]");
        if (r == 0) m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(row.size()));
        if (static_cast<Eigen::Index>(row.size()) != m.cols())
            throw_input(path + " rows must all have the same length");
        for (std::size_t c = 0; c < row.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
    return m;
}

Density parse_density(const json& j, const std::string& path) {
    if (!j.is_object()) throw_input(path + " must be a JSON object");
    const json& type = require_field(j, "type", path);
    if (!type.is_string()) throw_input(path + ".type must be a string");
    const std::string kind = type.get<std::string>();

    Density parsed = [&]() -> Density {
        try {
            if (kind == "gaussian")
                return Density::gaussian(parse_vector(require_field(j, "mean", path), path + ".mean"),
                                         parse_matrix(require_field(j, "cov", path), path + ".cov"));
            if (kind == "axis_aligned_gaussian")
                return Density::axis_aligned_gaussian(
                    parse_vector(require_field(j, "mean", path), path + ".mean"),
                    parse_vector(require_field(j, "var", path), path + ".var"));
            if (kind == "mixture") {
                const json& comps = require_field(j, "components", path);
                if (!comps.is_array() || comps.empty())
                    throw_input(path + ".components must be a nonempty array");
                std::vector<Density> components;
                components.reserve(comps.size());
                for (std::size_t i = 0; i < comps.size(); ++i)
                    components.push_back(
                        parse_density(comps[i], path + ".components[" + std::to_string(i) + "]"));
                return Density::mixture(
                    parse_number_list(require_field(j, "weights", path), path + ".weights"),
                    std::move(components));
            }
            if (kind == "histogram1d")
                return Density::histogram1d(
                    parse_number(require_field(j, "left", path), path + ".left"),
                    parse_number(require_field(j, "right", path), path + ".right"),
                    parse_number_list(require_field(j, "masses", path), path + ".masses"));
        } catch (const Error& e) {
            if (std::string(e.what()).rfind(path, 0) == 0) throw;  // already carries a path
            throw Error(e.kind(), path + ": " + e.what());
        }
        throw_input(path + ".type \"" + kind + "\" is not a known density type");
    }();

    if (auto it = j.find("label"); it != j.end()) {
        if (!it->is_string()) throw_input(path + ".label must be a string");
        parsed = parsed.with_label(it->get<std::string>());
    }
    return parsed;
}

}  // namespace

std::string serialize(const Density& density) {
    std::string out;
    append_density(out, density);
    return out;
}

Density deserialize(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw_input("model text is not valid JSON at byte " + std::to_string(e.byte) + ": " +
                    e.what());
    }
    return parse_density(j, "$");
}

Density deserialize_file(const std::string& path) {
    try {
        return deserialize(read_text_file(path));
    } catch (const Error& e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

std::string points_to_text(const SampleSet& sample) {
    std::string out;
    for (const Point& p : sample.points) {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            if (i) out += ' ';
            out += format_double(p[i]);
        }
        out += '\n';
    }
    return out;
}

SampleSet parse_points_text(const std::string& text) {
    SampleSet out;
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream fields(line);
        std::vector<double> coords;
        std::string token;
        while (fields >> token) {
            double v = 0;
            const char* begin = token.data();
            const char* end = begin + token.size();
            auto res = std::from_chars(begin, end, v);
            if (res.ec != std::errc() || res.ptr != end)
                throw_input("line " + std::to_string(lineno) + ": \"" + token +
                            "\" is not a decimal number");
            coords.push_back(v);
        }
        if (out.dim == 0) out.dim = static_cast<int>(coords.size());
        if (static_cast<int>(coords.size()) != out.dim)
            throw_input("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(out.dim) + " coordinates, got " +
                        std::to_string(coords.size()));
        out.points.push_back(
            Eigen::Map<const Eigen::VectorXd>(coords.data(), static_cast<Eigen::Index>(coords.size())));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_input("cannot open \"" + path + "\" for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw_input("failed while writing \"" + path + "\"");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_input("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace mixlearn
