#include "statboost/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace statboost {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

// One CSV record; handles quoted fields and embedded commas.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

Dataset::Dataset(std::vector<ColumnSpec> columns, Eigen::MatrixXd values,
                 Eigen::VectorXd response)
    : columns_(std::move(columns)),
      values_(std::move(values)),
      response_(std::move(response)) {
    if (values_.cols() != static_cast<Eigen::Index>(columns_.size()))
        throw DataError("column spec count does not match value matrix width");
    if (response_.size() != values_.rows())
        throw DataError("response length does not match row count");
}

Eigen::Index Dataset::column_index(const std::string& name) const {
    for (std::size_t j = 0; j < columns_.size(); ++j)
        if (columns_[j].name == name) return static_cast<Eigen::Index>(j);
    throw DataError("unknown column '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
    for (const auto& c : columns_)
        if (c.name == name) return true;
    return false;
}

const ColumnSpec& Dataset::column(const std::string& name) const {
    return columns_[static_cast<std::size_t>(column_index(name))];
}

Eigen::VectorXd Dataset::column_values(const std::string& name) const {
    return values_.col(column_index(name));
}

Dataset Dataset::subset(const std::vector<std::size_t>& row_indices) const {
    Eigen::Index m = static_cast<Eigen::Index>(row_indices.size());
    Eigen::MatrixXd v(m, values_.cols());
    Eigen::VectorXd r(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        std::size_t src = row_indices[static_cast<std::size_t>(i)];
        if (src >= static_cast<std::size_t>(values_.rows()))
            throw DataError("row index out of range in subset");
        v.row(i) = values_.row(static_cast<Eigen::Index>(src));
        r(i) = response_(static_cast<Eigen::Index>(src));
    }
    return Dataset(columns_, std::move(v), std::move(r));
}

Dataset parse_csv(const std::string& text, const std::string& response_column,
                  const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw DataError(origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_record(line);
    for (auto& h : header) h = trim(h);
    if (header.empty()) throw DataError(origin + ": empty header row");

    std::size_t ncols = header.size();
    std::ptrdiff_t response_idx = -1;
    for (std::size_t j = 0; j < ncols; ++j)
        if (!response_column.empty() && header[j] == response_column)
            response_idx = static_cast<std::ptrdiff_t>(j);
    if (response_idx < 0 && !response_column.empty())
        throw DataError(origin + ": response column '" + response_column +
                        "' not found in header");

    std::vector<std::vector<std::string>> cells(ncols);
    std::size_t nrows = 0;
    std::size_t file_line = 1;
    while (std::getline(in, line)) {
        ++file_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> rec = split_record(line);
        if (rec.size() != ncols) {
            throw DataError(origin + ": line " + std::to_string(file_line) +
                            " has " + std::to_string(rec.size()) +
                            " fields, expected " + std::to_string(ncols));
        }
        for (std::size_t j = 0; j < ncols; ++j) {
            std::string v = trim(rec[j]);
            if (v.empty())
                throw DataError(origin + ": missing value at line " +
                                std::to_string(file_line) + ", column '" +
                                header[j] + "'");
            cells[j].push_back(std::move(v));
        }
        ++nrows;
    }
    if (nrows == 0) throw DataError(origin + ": no data rows");

    // Response: must be numeric throughout. An empty response_column loads
    // covariates only (prediction on unlabeled data).
    Eigen::VectorXd response = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nrows));
    if (response_idx >= 0) {
        for (std::size_t i = 0; i < nrows; ++i) {
            double v = 0.0;
            if (!parse_double(cells[static_cast<std::size_t>(response_idx)][i], v) ||
                !std::isfinite(v))
                throw DataError(origin + ": response value '" +
                                cells[static_cast<std::size_t>(response_idx)][i] +
                                "' at data row " + std::to_string(i + 1) +
                                " is not numeric");
            response(static_cast<Eigen::Index>(i)) = v;
        }
    }

    // Covariates: numeric if every value parses, otherwise categorical with
    // lexicographic level coding.
    std::vector<ColumnSpec> specs;
    std::vector<Eigen::VectorXd> cols;
    for (std::size_t j = 0; j < ncols; ++j) {
        if (static_cast<std::ptrdiff_t>(j) == response_idx) continue;
        ColumnSpec spec;
        spec.name = header[j];
        Eigen::VectorXd col(static_cast<Eigen::Index>(nrows));
        bool numeric = true;
        for (std::size_t i = 0; i < nrows && numeric; ++i) {
            double v = 0.0;
            // Non-finite tokens ("inf", "nan") fall through to categorical
            // treatment rather than poisoning the design matrices.
            if (parse_double(cells[j][i], v) && std::isfinite(v))
                col(static_cast<Eigen::Index>(i)) = v;
            else
                numeric = false;
        }
        if (numeric) {
            spec.kind = ColumnKind::Numeric;
        } else {
            spec.kind = ColumnKind::Categorical;
            std::map<std::string, int> codes;
            for (std::size_t i = 0; i < nrows; ++i) codes[cells[j][i]] = 0;
            int next = 0;
            for (auto& [level, code] : codes) {
                code = next++;
                spec.levels.push_back(level);
            }
            for (std::size_t i = 0; i < nrows; ++i)
                col(static_cast<Eigen::Index>(i)) = codes[cells[j][i]];
        }
        specs.push_back(std::move(spec));
        cols.push_back(std::move(col));
    }

    Eigen::MatrixXd values(static_cast<Eigen::Index>(nrows),
                           static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        values.col(static_cast<Eigen::Index>(j)) = cols[j];
    return Dataset(std::move(specs), std::move(values), std::move(response));
}

Dataset load_csv(const std::string& path, const std::string& response_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), response_column, path);
}

Dataset standardize(const Dataset& d) {
    Eigen::Index n = d.rows();
    if (n < 2) throw DataError("standardize requires at least 2 rows");
    std::vector<ColumnSpec> specs = d.columns();
    Eigen::MatrixXd values = d.values();
    for (std::size_t j = 0; j < specs.size(); ++j) {
        if (specs[j].kind != ColumnKind::Numeric) continue;
        Eigen::Index col = static_cast<Eigen::Index>(j);
        double mean = values.col(col).mean();
        double sd = std::sqrt((values.col(col).array() - mean).square().sum() /
                              static_cast<double>(n - 1));
        if (!(sd > 0.0))
            throw DataError("column '" + specs[j].name +
                            "' is constant; cannot standardize");
        values.col(col) = (values.col(col).array() - mean) / sd;
        if (specs[j].scaling) {
            // Compose so the record still maps raw data to stored values.
            ColumnScaling prev = *specs[j].scaling;
            specs[j].scaling = ColumnScaling{prev.mean + prev.sd * mean, prev.sd * sd};
        } else {
            specs[j].scaling = ColumnScaling{mean, sd};
        }
    }
    return Dataset(std::move(specs), std::move(values), d.response());
}

}  // namespace statboost
