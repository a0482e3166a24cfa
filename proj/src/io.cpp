#include "rflab/io.hpp"

#include "rflab/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rflab {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty())
        return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        return std::nullopt;
    return v;
}

Json scalar_value(const std::string& raw)
{
    std::string v = trim(raw);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    if (auto d = parse_double(v)) {
        // Integers stay integers so that counts read back exactly.
        if (v.find_first_of(".eE") == std::string::npos && std::abs(*d) < 9.0e15)
            return static_cast<std::int64_t>(*d);
        return *d;
    }
    return v;
}

} // namespace

// --- profile text format ---------------------------------------------------

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_profile(std::ostream& out, const ProfileMetric& profile, std::optional<double> time)
{
    out << "# rflab-profile v1\n";
    out << "# q " << profile.q << "\n";
    out << "# topology " << to_string(profile.topology) << "\n";
    out << "# symmetric " << (profile.symmetric ? 1 : 0) << "\n";
    out << "# period " << format_number(profile.period) << "\n";
    if (time)
        out << "# time " << format_number(*time) << "\n";
    out << "x phi psi\n";
    char line[128];
    for (std::size_t i = 0; i < profile.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g %.17g %.17g\n", profile.x[i], profile.phi[i], profile.psi[i]);
        out << line;
    }
}

ProfileFile read_profile(std::istream& in, const std::string& source)
{
    ProfileFile f;
    std::string line;
    std::size_t lineno = 0;
    bool magic = false, header = false;
    auto where = [&] { return source + ":" + std::to_string(lineno); };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '#') {
            std::istringstream ss(t.substr(1));
            std::string key, value;
            ss >> key;
            std::getline(ss, value);
            value = trim(value);
            if (key == "rflab-profile") {
                if (value != "v1")
                    throw ConfigError(where(), "unsupported profile format version '" + value + "'");
                magic = true;
            } else if (key == "q") {
                const auto v = parse_double(value);
                if (!v || *v != std::floor(*v))
                    throw ConfigError(where(), "q must be an integer");
                f.profile.q = static_cast<int>(*v);
            } else if (key == "topology") {
                try {
                    f.profile.topology = topology_from_string(value);
                } catch (const ParameterError& e) {
                    throw ConfigError(where(), e.what());
                }
            } else if (key == "symmetric") {
                f.profile.symmetric = value == "1" || value == "true";
            } else if (key == "period") {
                const auto v = parse_double(value);
                if (!v)
                    throw ConfigError(where(), "period must be a number");
                f.profile.period = *v;
            } else if (key == "time") {
                const auto v = parse_double(value);
                if (!v)
                    throw ConfigError(where(), "time must be a number");
                f.time = *v;
            }
            continue;
        }
        if (!magic)
            throw ConfigError(where(), "missing '# rflab-profile v1' header");
        if (!header) {
            if (t != "x phi psi")
                throw ConfigError(where(), "expected column header 'x phi psi'");
            header = true;
            continue;
        }
        std::istringstream ss(t);
        std::string a, b, c, extra;
        ss >> a >> b >> c;
        if (ss >> extra)
            throw ConfigError(where(), "expected three columns");
        const auto x = parse_double(a), phi = parse_double(b), psi = parse_double(c);
        if (!x || !phi || !psi)
            throw ConfigError(where(), "expected three numbers");
        f.profile.x.push_back(*x);
        f.profile.phi.push_back(*phi);
        f.profile.psi.push_back(*psi);
    }
    if (!magic)
        throw ConfigError(source, "missing '# rflab-profile v1' header");
    try {
        f.profile.validate();
    } catch (const InvariantError& e) {
        throw ConfigError(source, e.what());
    }
    return f;
}

void save_profile(const std::filesystem::path& path, const ProfileMetric& profile, std::optional<double> time)
{
    std::ostringstream ss;
    write_profile(ss, profile, time);
    write_text(path, ss.str());
}

ProfileFile load_profile(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), "cannot open file");
    return read_profile(in, path.string());
}

// --- CSV -------------------------------------------------------------------

std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header))
{
    if (header_.empty())
        throw ParameterError("csv: header must not be empty");
}

void CsvWriter::add_row(std::vector<std::string> fields)
{
    if (fields.size() != header_.size())
        throw ParameterError("csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(header_.size()));
    rows_.push_back(std::move(fields));
}

void CsvWriter::add_row(const std::vector<double>& values)
{
    std::vector<std::string> fields;
    fields.reserve(values.size());
    for (double v : values)
        fields.push_back(format_number(v));
    add_row(std::move(fields));
}

std::string CsvWriter::str() const
{
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k)
                out += ',';
            out += csv_escape(row[k]);
        }
        out += "\r\n";
    };
    emit(header_);
    for (const auto& r : rows_)
        emit(r);
    return out;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, str()); }

// --- JSON ------------------------------------------------------------------

Json profile_to_json(const ProfileMetric& profile)
{
    Json j;
    j["q"] = profile.q;
    j["topology"] = to_string(profile.topology);
    j["symmetric"] = profile.symmetric;
    j["period"] = profile.period;
    j["x"] = profile.x;
    j["phi"] = profile.phi;
    j["psi"] = profile.psi;
    return j;
}

Json field_to_json(const CoordinateMetricField& field)
{
    Json j;
    j["dim"] = field.dim;
    j["axes"] = field.axes;
    Json mats = Json::array();
    for (const auto& m : field.g) {
        Json rows = Json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            Json row = Json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                row.push_back(m(r, c));
            rows.push_back(std::move(row));
        }
        mats.push_back(std::move(rows));
    }
    j["g"] = std::move(mats);
    return j;
}

CoordinateMetricField field_from_json(const Json& j)
{
    CoordinateMetricField f;
    try {
        f.dim = j.at("dim").get<int>();
        f.axes = j.at("axes").get<std::vector<std::vector<double>>>();
        for (const auto& mj : j.at("g")) {
            const auto rows = mj.get<std::vector<std::vector<double>>>();
            Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), f.dim);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<int>(rows[r].size()) != f.dim)
                    throw ConfigError("metric field", "matrix row has wrong length");
                for (int c = 0; c < f.dim; ++c)
                    m(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
            }
            f.g.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("metric field", e.what());
    }
    f.validate();
    return f;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParameterError("cannot write " + path.string());
    out << text;
}

void save_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

// --- configuration ---------------------------------------------------------

Json parse_ini(std::istream& in, const std::string& source)
{
    Json root = Json::object();
    Json* section = &root;
    std::string section_name;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        std::string t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';')
            continue;
        // inline comment: '#' or ';' after whitespace
        for (std::size_t i = 1; i < t.size(); ++i)
            if ((t[i] == '#' || t[i] == ';') && std::isspace(static_cast<unsigned char>(t[i - 1]))) {
                t = trim(t.substr(0, i));
                break;
            }
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError(where, "unterminated section header");
            section_name = trim(t.substr(1, t.size() - 2));
            if (section_name.empty())
                throw ConfigError(where, "empty section name");
            if (root.contains(section_name))
                throw ConfigError(where, "duplicate section [" + section_name + "]");
            root[section_name] = Json::object();
            section = &root[section_name];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where, "expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(where, "missing key");
        if (section->contains(key))
            throw ConfigError(where, "duplicate key '" + key + "'");
        if (value.find(',') != std::string::npos && !(value.front() == '"' && value.back() == '"')) {
            Json list = Json::array();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                list.push_back(scalar_value(item));
            (*section)[key] = std::move(list);
        } else {
            (*section)[key] = scalar_value(value);
        }
    }
    return root;
}

Json parse_config_text(const std::string& text, const std::string& source)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return Json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(source, e.what());
        }
    }
    std::istringstream in(text);
    return parse_ini(in, source);
}

Json load_config(const std::filesystem::path& path) { return parse_config_text(read_text(path), path.string()); }

} // namespace rflab
