#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ecgap/audit.hpp"
#include "ecgap/curve.hpp"
#include "ecgap/eds.hpp"
#include "ecgap/errors.hpp"
#include "ecgap/factor.hpp"
#include "ecgap/numeric.hpp"
#include "ecgap/wieferich.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ecgap;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            return parts;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

// Accepts "a:b:d", "O", or an "x,y" pair of rationals; always leaves with a
// point known to lie on the curve.
RationalPoint parse_point_on_curve(const Curve& E, const std::string& text) {
    if (text.find(':') != std::string::npos || text == "O") {
        RationalPoint P = RationalPoint::parse(text);
        if (!P.is_identity() && !E.contains(P.x(), P.y()))
            throw NotOnCurve("point does not satisfy the curve equation");
        return P;
    }
    const auto parts = split(text, ',');
    if (parts.size() != 2)
        throw ParseError("point must be \"a:b:d\", \"O\" or \"x,y\"");
    return decompose(E, parse_rational(parts[0]), parse_rational(parts[1]));
}

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> eps;
    for (const std::string& tok : split(text, ',')) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != tok.size())
            throw ParseError("bad epsilon value \"" + tok + "\"");
        eps.push_back(v);
    }
    return eps;
}

std::string cache_key(const Curve& E, const RationalPoint& P) {
    std::string out;
    for (char c : E.to_string() + "_" + P.to_string()) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += c;
        else if (c == '-')
            out += 'm';
        else if (c == ',' || c == ':' || c == '_')
            out += '_';
    }
    return out;
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary);
            if (!file) throw Error("cannot open output file: " + path);
            os = &file;
        }
    }
};

int run_decompose(const std::string& curve_s, const std::string& point_s,
                  const std::string& out_path, bool as_json) {
    const Curve E = Curve::parse(curve_s);
    const RationalPoint P = parse_point_on_curve(E, point_s);
    const FactoredInteger fd = factor(P.d());
    const mpz_class rad = radical(fd);
    const SqfreeSplit split = sqfree_split(fd);
    const double height = naive_height(P).value;
    const double logc = log_abs(rad);

    OutputTarget out(out_path);
    if (as_json) {
        json j;
        j["curve"] = E.to_string();
        j["a"] = P.a().get_str();
        j["b"] = P.b().get_str();
        j["d"] = P.d().get_str();
        j["rad_d"] = rad.get_str();
        j["d_prime"] = split.d_prime.get_str();
        j["v"] = split.v.get_str();
        j["height"] = height;
        j["log_conductor"] = logc;
        *out.os << j.dump(2) << "\n";
    } else {
        *out.os << "curve=" << E.to_string() << "\n"
                << "a=" << P.a() << "\n"
                << "b=" << P.b() << "\n"
                << "d=" << P.d() << "\n"
                << "rad_d=" << rad << "\n"
                << "d_prime=" << split.d_prime << "\n"
                << "v=" << split.v << "\n"
                << "height=" << format_real(height) << "\n"
                << "log_conductor=" << format_real(logc) << "\n";
    }
    return 0;
}

json summary_to_json(const std::map<double, EpsilonSummary>& sums) {
    json j = json::object();
    for (const auto& [eps, s] : sums) {
        json e;
        e["sup_conj"] = s.conj.sup;
        e["argmax_conj"] = s.conj.argmax_n;
        e["sup_siegel"] = s.siegel.sup;
        e["argmax_siegel"] = s.siegel.argmax_n;
        e["sup_prop"] = s.prop.sup;
        e["argmax_prop"] = s.prop.argmax_n;
        e["sup_vq"] = s.vq.sup;
        e["argmax_vq"] = s.vq.argmax_n;
        e["incomplete"] = s.incomplete_rows;
        j[format_real(eps)] = e;
    }
    return j;
}

int run_audit(const std::string& curve_s, const std::string& point_s,
              unsigned long n_max, std::vector<double> eps,
              std::uint64_t budget, const std::string& dprime_bound_s,
              const std::string& cache_dir, const std::string& out_path,
              bool as_json) {
    const Curve E = Curve::parse(curve_s);
    const RationalPoint P = parse_point_on_curve(E, point_s);
    const mpz_class dprime_bound = parse_integer(dprime_bound_s);

    FactorCache cache;
    std::string cache_file;
    if (!cache_dir.empty()) {
        fs::create_directories(cache_dir);
        cache_file = (fs::path(cache_dir) / "factors.txt").string();
        cache.load(cache_file);
    }

    AuditOptions opt;
    opt.epsilons = std::move(eps);
    opt.factor_budget = budget;
    opt.cache = cache_file.empty() ? nullptr : &cache;
    const std::vector<GapRecord> records = audit_orbit(E, P, n_max, opt);
    const auto sums = empirical_constants(records);

    OutputTarget out(out_path);
    if (as_json) {
        json j;
        j["rows"] = json::array();
        const ScanResult scan = scan_special_denominators(records, dprime_bound);
        for (const GapRecord& r : records) {
            json row;
            row["n"] = r.n;
            row["epsilon"] = r.epsilon;
            row["digits_d"] = decimal_digits(r.d);
            row["log_d"] = r.log_d;
            row["gap_siegel"] = r.gap_siegel;
            row["status"] = r.complete ? "ok" : "incomplete";
            if (r.complete) {
                row["log_rad_d"] = r.log_rad_d;
                row["log_dprime"] = r.log_dprime;
                row["log_v"] = r.log_v;
                row["gap_conj"] = r.gap_conj;
                row["gap_prop"] = r.gap_prop;
                row["gap_vq"] = r.gap_vq;
            }
            j["rows"].push_back(std::move(row));
        }
        j["perfect_power_rows"] = scan.perfect_power;
        j["small_dprime_rows"] = scan.small_d_prime;
        j["summary"] = summary_to_json(sums);
        *out.os << j.dump(2) << "\n";
    } else {
        write_csv(*out.os, records, dprime_bound);
    }

    if (!cache_file.empty()) cache.append_new_to(cache_file);

    // Summary block on stdout; "#" keeps it comment-like next to CSV rows.
    for (const auto& [e, s] : sums) {
        std::cout << "# epsilon=" << format_real(e) << " sup_conj="
                  << format_real(s.conj.sup) << " (n=" << s.conj.argmax_n
                  << ") sup_siegel=" << format_real(s.siegel.sup)
                  << " (n=" << s.siegel.argmax_n
                  << ") sup_prop=" << format_real(s.prop.sup)
                  << " (n=" << s.prop.argmax_n
                  << ") sup_vq=" << format_real(s.vq.sup)
                  << " (n=" << s.vq.argmax_n
                  << ") incomplete=" << s.incomplete_rows.size() << "\n";
    }
    return 0;
}

std::string census_string(const WieferichCount& res) {
    std::string census;
    for (const auto& [reason, cnt] : res.excluded) {
        if (!census.empty()) census += ';';
        census += to_string(reason) + ":" + std::to_string(cnt);
    }
    return census;
}

int run_wieferich(const std::string& curve_s, const std::string& point_s,
                  std::uint64_t x_max, unsigned precision,
                  std::uint64_t pcount_cap, unsigned workers,
                  const std::string& cache_dir, const std::string& out_path,
                  bool as_json) {
    const Curve E = Curve::parse(curve_s);
    const RationalPoint P = parse_point_on_curve(E, point_s);

    VerdictCache cache;
    std::string cache_file;
    if (!cache_dir.empty()) {
        fs::create_directories(cache_dir);
        cache_file =
            (fs::path(cache_dir) / ("verdicts_" + cache_key(E, P) + ".txt"))
                .string();
        cache.load(cache_file);
    }

    WieferichOptions opt;
    opt.precision = precision;
    opt.pcount_cap = pcount_cap;
    opt.workers = workers;
    opt.cache = cache_file.empty() ? nullptr : &cache;
    const WieferichCount res = count_wieferich(E, P, x_max, opt);

    OutputTarget out(out_path);
    if (as_json) {
        json j;
        j["rows"] = json::array();
        for (const PrimeVerdict& v : res.verdicts) {
            json row;
            row["p"] = v.p();
            row["N_p"] = v.red.N_p;
            row["m_p"] = v.red.m_p;
            row["verdict"] = to_string(v.verdict);
            row["evidence"] = v.evidence();
            j["rows"].push_back(std::move(row));
        }
        j["count"] = res.count;
        j["wieferich"] = res.wieferich;
        j["bound"] = res.bound;
        json ex = json::object();
        for (const auto& [reason, cnt] : res.excluded)
            ex[to_string(reason)] = cnt;
        j["excluded"] = ex;
        *out.os << j.dump(2) << "\n";
    } else {
        *out.os << "p,N_p,m_p,verdict,evidence\n";
        for (const PrimeVerdict& v : res.verdicts)
            *out.os << VerdictCache::format_line(v) << "\n";
        *out.os << "count=" << res.count << ", bound=" << format_real(res.bound)
                << ", excluded=" << census_string(res) << "\n";
    }

    if (!cache_file.empty()) cache.append_new_to(cache_file);
    return 0;
}

int run_eds(const std::string& curve_s, const std::string& point_s,
            unsigned long n_max, unsigned long exact_cap,
            const std::string& out_path, bool as_json) {
    const Curve E = Curve::parse(curve_s);
    const RationalPoint P = parse_point_on_curve(E, point_s);
    if (P.is_identity()) throw IdentityPoint("eds needs an affine base point");

    OutputTarget out(out_path);
    json rows = json::array();
    if (!as_json) *out.os << "n,d_n,psi_n\n";
    RationalPoint Q = P;
    for (unsigned long n = 1; n <= n_max; ++n) {
        const mpq_class psi = psi_exact(E, n, P, exact_cap);
        const std::string d_str =
            Q.is_identity() ? std::string("0") : Q.d().get_str();
        if (as_json) {
            json row;
            row["n"] = n;
            row["d_n"] = d_str;
            row["psi_n"] = psi.get_str();
            rows.push_back(std::move(row));
        } else {
            *out.os << n << ',' << d_str << ',' << psi.get_str() << "\n";
        }
        if (n < n_max) Q = add(E, Q, P);
    }
    if (as_json) {
        json j;
        j["rows"] = std::move(rows);
        *out.os << j.dump(2) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Exact experiments on elliptic-curve denominator growth: height-gap "
        "audits, divisibility sequences, and the non-Wieferich prime census."};
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "read options from a config file");
    bool dump_config = false;
    app.add_flag("--dump-config", dump_config,
                 "print the effective configuration and exit");

    std::string curve_s = "[0,-2]";
    std::string point_s = "3:5:1";
    std::string out_path, cache_dir;
    bool as_json = false;
    unsigned long n_max = 60;
    std::string eps_s = "0,0.1,0.2,0.5,1";
    std::uint64_t factor_budget = 8'000'000;
    std::string dprime_bound_s = "1";
    std::uint64_t x_max = 10'000;
    unsigned precision = 3;
    std::uint64_t pcount_cap = 1ull << 22;
    unsigned workers = 1;
    unsigned long eds_n_max = 30;
    unsigned long exact_cap = 200;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--curve", curve_s,
                        "curve [a1,a2,a3,a4,a6] or short form [A,B]")
            ->capture_default_str();
        sub->add_option("--point", point_s, "base point a:b:d, O, or x,y")
            ->capture_default_str();
        sub->add_option("--out", out_path, "write the report here (default stdout)");
        sub->add_flag("--json", as_json, "emit JSON instead of CSV/plain text");
    };

    CLI::App* dec = app.add_subcommand(
        "decompose", "normalize a point to (a,b,d) and report rad/split/height");
    add_common(dec);

    CLI::App* aud = app.add_subcommand(
        "audit", "gap statistics along the orbit n*P, n = 1..N");
    add_common(aud);
    aud->add_option("--n-max", n_max, "largest multiple of the base point")
        ->capture_default_str();
    aud->add_option("--eps", eps_s, "comma-separated epsilon values")
        ->capture_default_str();
    aud->add_option("--factor-budget", factor_budget,
                    "rho iterations per denominator before a row goes incomplete")
        ->capture_default_str();
    aud->add_option("--dprime-bound", dprime_bound_s,
                    "flag rows whose squarefree part is at most this")
        ->capture_default_str();
    aud->add_option("--cache-dir", cache_dir, "factor-cache directory");

    CLI::App* wie = app.add_subcommand(
        "wieferich", "classify all primes up to x-max and compare to sqrt(log X)");
    add_common(wie);
    wie->add_option("--x-max", x_max, "upper bound X of the prime range")
        ->capture_default_str();
    wie->add_option("--precision", precision, "p-adic precision k of the ladder")
        ->capture_default_str();
    wie->add_option("--pcount-cap", pcount_cap,
                    "largest prime the point counter will enumerate")
        ->capture_default_str();
    wie->add_option("--workers", workers, "worker threads (output is order-stable)")
        ->capture_default_str();
    wie->add_option("--cache-dir", cache_dir, "verdict-cache directory");

    CLI::App* eds = app.add_subcommand(
        "eds", "dump the divisibility sequence d_n and psi_n values");
    add_common(eds);
    eds->add_option("--n-max", eds_n_max, "table length")->capture_default_str();
    eds->add_option("--exact-cap", exact_cap,
                    "refuse exact psi computation beyond this index")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (dump_config) {
        std::cout << app.config_to_str(true, false);
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 1;
    }

    try {
        if (dec->parsed())
            return run_decompose(curve_s, point_s, out_path, as_json);
        if (aud->parsed())
            return run_audit(curve_s, point_s, n_max, parse_eps_list(eps_s),
                             factor_budget, dprime_bound_s, cache_dir,
                             out_path, as_json);
        if (wie->parsed())
            return run_wieferich(curve_s, point_s, x_max, precision,
                                 pcount_cap, workers, cache_dir, out_path,
                                 as_json);
        if (eds->parsed())
            return run_eds(curve_s, point_s, eds_n_max, exact_cap, out_path,
                           as_json);
    } catch (const TorsionBase& ex) {
        std::cerr << "error: TorsionBase: " << ex.what() << "\n";
        return 3;
    } catch (const CapExceeded& ex) {
        std::cerr << "error: CapExceeded: " << ex.what() << "\n";
        return 4;
    } catch (const NotOnCurve& ex) {
        std::cerr << "error: NotOnCurve: " << ex.what() << "\n";
        return 2;
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "internal error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
