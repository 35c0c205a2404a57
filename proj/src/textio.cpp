#include "slnd/textio.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace slnd {

QMat parse_matrix_text(std::istream& in) {
    std::vector<std::vector<Rat>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<Rat> row;
        std::string tok;
        while (ls >> tok) {
            if (tok.find_first_of(".eE") != std::string::npos &&
                tok.find('/') == std::string::npos)
                row.push_back(rat_from_double(std::stod(tok)));  // float-layer entries
            else
                row.push_back(parse_rational(tok));
        }
        if (row.empty()) {
            if (rows.empty()) continue;  // leading blank lines
            break;                       // blank line terminates
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("matrix text: inconsistent row lengths");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix text: no rows");
    QMat m(int(rows.size()), int(rows.front().size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

QMat parse_matrix_text(const std::string& text) {
    std::istringstream is(text);
    return parse_matrix_text(is);
}

std::vector<QMat> parse_matrices_text(std::istream& in) {
    std::vector<QMat> out;
    while (in) {
        try {
            out.push_back(parse_matrix_text(in));
        } catch (const std::invalid_argument&) {
            break;  // trailing whitespace
        }
    }
    if (out.empty()) throw std::invalid_argument("matrix text: no matrices");
    return out;
}

std::string matrix_to_text(const QMat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << rational_to_string(m(i, j));
        os << "\n";
    }
    return os.str();
}

std::string format_double17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void dump_rec(const Json& j, std::string& out, int indent, int depth) {
    const std::string pad(size_t(indent) * depth, ' ');
    const std::string pad_in(size_t(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::detail::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + Json(it.key()).dump() + ": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_rec(v, out, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case nlohmann::detail::value_t::number_float: {
            double v = j.get<double>();
            out += std::isfinite(v) ? format_double17(v) : "null";
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string json_dump_17(const Json& j, int indent) {
    std::string out;
    dump_rec(j, out, indent, 0);
    out += "\n";
    return out;
}

Json matrix_to_json(const QMat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) {
            const Rat& v = m(i, j);
            if (boost::multiprecision::denominator(v) == 1 &&
                abs_int(boost::multiprecision::numerator(v)) < Int(1) << 53)
                row.push_back(boost::multiprecision::numerator(v).convert_to<long long>());
            else
                row.push_back(rational_to_string(v));
        }
        rows.push_back(row);
    }
    return rows;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j) == 0 ? 0.0 : m(i, j));
        rows.push_back(row);
    }
    return rows;
}

QMat matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix json: array of rows expected");
    const int rows = int(j.size());
    const int cols = int(j[0].size());
    QMat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (int(j[i].size()) != cols) throw std::invalid_argument("matrix json: ragged rows");
        for (int c = 0; c < cols; ++c) {
            const auto& v = j[i][c];
            if (v.is_string())
                m(i, c) = parse_rational(v.get<std::string>());
            else if (v.is_number_integer())
                m(i, c) = Rat(v.get<long long>());
            else if (v.is_number_float())
                m(i, c) = rat_from_double(v.get<double>());
            else
                throw std::invalid_argument("matrix json: entry must be a number or 'p/q' string");
        }
    }
    return m;
}

}  // namespace slnd
