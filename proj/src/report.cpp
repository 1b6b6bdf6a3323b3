#include "dicke/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dicke {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kColumns = 22;

double parse_double(const std::string& s) {
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("parse: not a number: '" + s + "'");
    return v;
}

double json_double(const ordered_json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void emit_csv(const std::vector<SweepRow>& rows, std::ostream& out, const EmitOptions& options) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        const auto& o = r.obs;
        out << to_string(r.model) << ',' << r.n_atoms << ',' << format_double(r.delta) << ','
            << format_double(r.lambda) << ',' << format_double(r.f) << ',' << r.ntr << ','
            << format_double(o.epsilon) << ',' << format_double(o.eta) << ',' << format_double(o.alpha) << ','
            << format_double(o.photons.c0) << ',' << format_double(o.photons.c1) << ','
            << format_double(o.photons.cmult) << ',' << format_double(o.sigma_x) << ','
            << format_double(o.sigma_p) << ',' << format_double(o.r) << ',' << format_double(o.xi) << ','
            << format_double(o.pi_entropy) << ',' << format_double(o.gap) << ',' << (o.degenerate ? 1 : 0) << ','
            << (r.converged ? 1 : 0) << ',' << r.iterations << ','
            << format_double(options.timing ? r.ms : 0.0) << '\n';
    }
}

void emit_json(const std::vector<SweepRow>& rows, std::ostream& out, const EmitOptions& options) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
        const auto& o = r.obs;
        ordered_json j;
        j["model"] = to_string(r.model);
        j["N"] = r.n_atoms;
        j["delta"] = r.delta;
        j["lambda"] = r.lambda;
        j["f"] = r.f;
        j["ntr"] = r.ntr;
        j["epsilon"] = o.epsilon;
        j["eta"] = o.eta;
        j["alpha"] = o.alpha;
        j["c0"] = o.photons.c0;
        j["c1"] = o.photons.c1;
        j["cmult"] = o.photons.cmult;
        j["sigma_x"] = o.sigma_x;
        j["sigma_p"] = o.sigma_p;
        j["r"] = o.r;
        j["xi"] = o.xi;
        j["entropy"] = o.pi_entropy;
        j["gap"] = o.gap;
        j["degenerate"] = o.degenerate;
        j["converged"] = r.converged;
        j["iters"] = r.iterations;
        j["ms"] = options.timing ? r.ms : 0.0;
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

void emit(const std::vector<SweepRow>& rows, OutputFormat format, const std::string& path,
          const EmitOptions& options) {
    auto write = [&](std::ostream& out) {
        if (format == OutputFormat::Csv) {
            emit_csv(rows, out, options);
        } else {
            emit_json(rows, out, options);
        }
    };
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        if (!std::cout) throw std::runtime_error("emit: failed writing to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
    write(out);
    out.flush();
    if (!out) throw std::runtime_error("emit: write to '" + path + "' failed");
}

std::vector<SweepRow> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_csv: empty input");
    if (line != kCsvHeader) throw std::runtime_error("parse_csv: unexpected header '" + line + "'");
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != kColumns) throw std::runtime_error("parse_csv: row has " + std::to_string(cells.size()) + " columns");
        SweepRow r;
        auto& o = r.obs;
        r.model = parse_model_kind(cells[0].c_str());
        r.n_atoms = std::stoi(cells[1]);
        r.delta = parse_double(cells[2]);
        r.lambda = parse_double(cells[3]);
        r.f = parse_double(cells[4]);
        r.ntr = std::stoi(cells[5]);
        o.epsilon = parse_double(cells[6]);
        o.eta = parse_double(cells[7]);
        o.alpha = parse_double(cells[8]);
        o.photons.c0 = parse_double(cells[9]);
        o.photons.c1 = parse_double(cells[10]);
        o.photons.cmult = parse_double(cells[11]);
        o.sigma_x = parse_double(cells[12]);
        o.sigma_p = parse_double(cells[13]);
        o.r = parse_double(cells[14]);
        o.xi = parse_double(cells[15]);
        o.pi_entropy = parse_double(cells[16]);
        o.gap = parse_double(cells[17]);
        o.degenerate = cells[18] == "1";
        r.converged = cells[19] == "1";
        r.iterations = std::stol(cells[20]);
        r.ms = parse_double(cells[21]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SweepRow> parse_json(std::istream& in) {
    const ordered_json arr = ordered_json::parse(in);
    if (!arr.is_array()) throw std::runtime_error("parse_json: expected an array of rows");
    std::vector<SweepRow> rows;
    for (const auto& j : arr) {
        SweepRow r;
        auto& o = r.obs;
        r.model = parse_model_kind(j.at("model").get<std::string>().c_str());
        r.n_atoms = j.at("N").get<int>();
        r.delta = json_double(j.at("delta"));
        r.lambda = json_double(j.at("lambda"));
        r.f = json_double(j.at("f"));
        r.ntr = j.at("ntr").get<int>();
        o.epsilon = json_double(j.at("epsilon"));
        o.eta = json_double(j.at("eta"));
        o.alpha = json_double(j.at("alpha"));
        o.photons.c0 = json_double(j.at("c0"));
        o.photons.c1 = json_double(j.at("c1"));
        o.photons.cmult = json_double(j.at("cmult"));
        o.sigma_x = json_double(j.at("sigma_x"));
        o.sigma_p = json_double(j.at("sigma_p"));
        o.r = json_double(j.at("r"));
        o.xi = json_double(j.at("xi"));
        o.pi_entropy = json_double(j.at("entropy"));
        o.gap = json_double(j.at("gap"));
        o.degenerate = j.at("degenerate").get<bool>();
        r.converged = j.at("converged").get<bool>();
        r.iterations = j.at("iters").get<long>();
        r.ms = json_double(j.at("ms"));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_histogram(const PhotonDistribution& dist, std::ostream& out) {
    out << "n,prob\n";
    for (std::size_t n = 0; n < dist.probs.size(); ++n) out << n << ',' << format_double(dist.probs[n]) << '\n';
}

}  // namespace dicke
