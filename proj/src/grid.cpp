#include "riskpde/grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace riskpde {

namespace {

int axis_count(double lo, double hi, double step, const char* what) {
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument(std::string(what) + " spacing must be positive");
    if (!(hi >= lo))
        throw std::invalid_argument(std::string(what) + " range is inverted");
    const double cells = (hi - lo) / step;
    const long long n = std::llround(cells);
    if (std::fabs(cells - static_cast<double>(n)) > 1e-6 * std::max(1.0, cells))
        throw std::invalid_argument(std::string(what) +
                                    " spacing does not divide the range");
    return static_cast<int>(n) + 1;
}

} // namespace

int GridSpec::nx() const { return axis_count(x_lo, x_hi, dx, "x"); }
int GridSpec::nt() const { return axis_count(t_lo, t_hi, dt, "T"); }

void GridSpec::validate() const {
    (void)nx();
    (void)nt();
}

std::string to_string(Kind k) {
    switch (k) {
        case Kind::F: return "F";
        case Kind::G: return "G";
        case Kind::Q: return "Q";
        case Kind::N: return "N";
    }
    throw std::logic_error("bad kind");
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::MC: return "MC";
        case Provenance::McDenoised: return "MC-denoised";
        case Provenance::FD: return "FD";
        case Provenance::PINN: return "PINN";
        case Provenance::Analytic: return "ANALYTIC";
    }
    throw std::logic_error("bad provenance");
}

Kind parse_kind(const std::string& s) {
    if (s == "F") return Kind::F;
    if (s == "G") return Kind::G;
    if (s == "Q") return Kind::Q;
    if (s == "N") return Kind::N;
    throw std::invalid_argument("unknown kind: " + s);
}

Provenance parse_provenance(const std::string& s) {
    if (s == "MC") return Provenance::MC;
    if (s == "MC-denoised") return Provenance::McDenoised;
    if (s == "FD") return Provenance::FD;
    if (s == "PINN") return Provenance::PINN;
    if (s == "ANALYTIC") return Provenance::Analytic;
    throw std::invalid_argument("unknown provenance: " + s);
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("bad number in field file: '" + s + "'");
    return v;
}

void write_csv_impl(const GridSpec& grid, const std::vector<double>& values,
                    double lambda, const std::string& kind, const std::string& prov,
                    std::ostream& os) {
    grid.validate();
    const int nx = grid.nx(), nt = grid.nt();
    if (values.size() != static_cast<std::size_t>(nx) * nt)
        throw std::invalid_argument("field value count does not match its grid");
    os << "x,T,lambda,kind,provenance,value\n";
    const std::string lam = format_double(lambda);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nt; ++j)
            os << format_double(grid.x(i)) << ',' << format_double(grid.t(j)) << ','
               << lam << ',' << kind << ',' << prov << ','
               << format_double(values[static_cast<std::size_t>(i) * nt + j]) << '\n';
    if (!os) throw std::runtime_error("field CSV write failed");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace

void write_csv(const ProbabilityField& f, std::ostream& os) {
    write_csv_impl(f.grid, f.values, f.lambda, to_string(f.kind),
                   to_string(f.provenance), os);
}

void write_csv(const GradientField& f, std::ostream& os) {
    write_csv_impl(f.grid, f.values, f.lambda, "grad_x", to_string(f.provenance), os);
}

ProbabilityField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty field CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,T,lambda,kind,provenance,value")
        throw std::invalid_argument("unexpected field CSV header: " + line);

    struct Row {
        double x, t, value;
    };
    std::vector<Row> rows;
    std::string kind_s, prov_s, lambda_s;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = split_csv_line(line);
        if (cols.size() != 6)
            throw std::invalid_argument("bad field CSV row: " + line);
        if (rows.empty()) {
            lambda_s = cols[2];
            kind_s = cols[3];
            prov_s = cols[4];
        } else if (cols[2] != lambda_s || cols[3] != kind_s || cols[4] != prov_s) {
            throw std::invalid_argument("field CSV mixes kinds, lambdas or provenances");
        }
        rows.push_back({parse_double(cols[0]), parse_double(cols[1]), parse_double(cols[5])});
    }
    if (rows.empty()) throw std::invalid_argument("field CSV has no data rows");

    // Recover the grid: nodes were written x-major, T fastest.
    const double t0 = rows[0].t;
    std::size_t nt = 1;
    while (nt < rows.size() && rows[nt].t != t0) ++nt;
    if (rows.size() % nt != 0)
        throw std::invalid_argument("field CSV rows do not form a full grid");
    const std::size_t nx = rows.size() / nt;

    ProbabilityField f;
    f.kind = parse_kind(kind_s);
    f.provenance = parse_provenance(prov_s);
    f.lambda = parse_double(lambda_s);
    f.grid.x_lo = rows[0].x;
    f.grid.x_hi = rows[(nx - 1) * nt].x;
    f.grid.t_lo = rows[0].t;
    f.grid.t_hi = rows[nt - 1].t;
    f.grid.dx = nx > 1 ? (f.grid.x_hi - f.grid.x_lo) / static_cast<double>(nx - 1) : 1.0;
    f.grid.dt = nt > 1 ? (f.grid.t_hi - f.grid.t_lo) / static_cast<double>(nt - 1) : 1.0;
    f.grid.validate();
    if (f.grid.nx() != static_cast<int>(nx) || f.grid.nt() != static_cast<int>(nt))
        throw std::invalid_argument("field CSV grid is not uniform");

    f.values.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t i = r / nt, j = r % nt;
        const double ex = f.grid.x(static_cast<int>(i)), et = f.grid.t(static_cast<int>(j));
        if (std::fabs(rows[r].x - ex) > 1e-9 * std::max(1.0, std::fabs(ex)) ||
            std::fabs(rows[r].t - et) > 1e-9 * std::max(1.0, std::fabs(et)))
            throw std::invalid_argument("field CSV nodes are out of order or non-uniform");
        f.values[r] = rows[r].value;
    }
    return f;
}

void write_json(const ProbabilityField& f, std::ostream& os) {
    f.grid.validate();
    nlohmann::json j;
    j["schema"] = 1;
    j["kind"] = to_string(f.kind);
    j["provenance"] = to_string(f.provenance);
    j["lambda"] = f.lambda;
    j["grid"] = {{"x_lo", f.grid.x_lo}, {"x_hi", f.grid.x_hi}, {"dx", f.grid.dx},
                 {"t_lo", f.grid.t_lo}, {"t_hi", f.grid.t_hi}, {"dt", f.grid.dt}};
    j["values"] = f.values;
    os << j.dump(1) << '\n';
    if (!os) throw std::runtime_error("field JSON write failed");
}

ProbabilityField read_field_json(std::istream& is) {
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad field JSON: ") + e.what());
    }
    try {
        ProbabilityField f;
        if (j.at("schema").get<int>() != 1)
            throw std::invalid_argument("unsupported field JSON schema");
        f.kind = parse_kind(j.at("kind").get<std::string>());
        f.provenance = parse_provenance(j.at("provenance").get<std::string>());
        f.lambda = j.at("lambda").get<double>();
        const auto& g = j.at("grid");
        f.grid = {g.at("x_lo").get<double>(), g.at("x_hi").get<double>(),
                  g.at("dx").get<double>(),   g.at("t_lo").get<double>(),
                  g.at("t_hi").get<double>(), g.at("dt").get<double>()};
        f.grid.validate();
        f.values = j.at("values").get<std::vector<double>>();
        if (f.values.size() !=
            static_cast<std::size_t>(f.grid.nx()) * static_cast<std::size_t>(f.grid.nt()))
            throw std::invalid_argument("field JSON value count does not match its grid");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad field JSON: ") + e.what());
    }
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return is;
}

} // namespace

void write_field_file(const ProbabilityField& f, const std::string& path) {
    auto os = open_out(path);
    if (ends_with(path, ".json"))
        write_json(f, os);
    else if (ends_with(path, ".csv"))
        write_csv(f, os);
    else
        throw std::invalid_argument("field files must end in .csv or .json: " + path);
}

void write_field_file(const GradientField& f, const std::string& path) {
    if (!ends_with(path, ".csv"))
        throw std::invalid_argument("gradient fields are CSV only: " + path);
    auto os = open_out(path);
    write_csv(f, os);
}

ProbabilityField read_field_file(const std::string& path) {
    auto is = open_in(path);
    if (ends_with(path, ".json")) return read_field_json(is);
    if (ends_with(path, ".csv")) return read_field_csv(is);
    throw std::invalid_argument("field files must end in .csv or .json: " + path);
}

} // namespace riskpde
