#include "optmol/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "optmol/steady.hpp"
#include "optmol/format.hpp"

namespace optmol {

namespace {

constexpr double kConsistencyTol = 1e-12;

SystemParams params_at(const SweepConfig& config, double a1, double a2, bool has_axis2) {
    SystemParams p = config.base;
    const auto apply = [&p](const std::string& name, double value) {
        if (name == "lambda")
            p.lambda = value;
        else
            p.t_b = p.t_a + value;  // name == "delta_t"
    };
    apply(config.axis1.name, a1);
    if (has_axis2) apply(config.axis2->name, a2);
    return p;
}

// One grid point, staged so a failing observable only blanks its own columns.
SweepRow evaluate_row(const SweepConfig& config, double a1, double a2, bool has_axis2) {
    const SystemParams p = params_at(config, a1, a2, has_axis2);
    SweepRow row;
    // Report the axis value verbatim when an axis drives delta_t.
    if (config.axis1.name == "delta_t")
        row.delta_t = a1;
    else if (has_axis2 && config.axis2->name == "delta_t")
        row.delta_t = a2;
    else
        row.delta_t = p.t_b - p.t_a;
    row.lambda = p.lambda;

    const auto note = [&row](std::uint32_t bits, const std::exception& e) {
        row.failed |= bits;
        if (row.error.empty()) row.error = e.what();
    };

    DerivedParams d;
    SteadyState ss;
    try {
        d = derive_params(p);
        ss = steady_analytic(d, p.gamma);
        row.record.coherence_abs = std::abs(ss.coherence);
    } catch (const std::exception& e) {
        note(kOutAll, e);
        return row;
    }

    const std::uint32_t wanted = config.outputs;
    if (wanted & kOutCurl) {
        try {
            const TransferGenerator a = transfer_generator(d, p.gamma);
            row.record.j_curl = curl_flux(a, ss.populations);
            if (std::abs(row.record.j_curl -
                         curl_flux_closed_form(d, p.gamma, ss.populations)) > kConsistencyTol)
                throw std::runtime_error("curl flux closed form mismatch");
        } catch (const std::exception& e) {
            note(kOutCurl, e);
        }
    }
    if (wanted & (kOutCurrents | kOutEpr)) {
        try {
            row.record.j_a = heat_current(Reservoir::a, ss, d, p.gamma);
            row.record.j_b = heat_current(Reservoir::b, ss, d, p.gamma);
            if (std::abs(row.record.j_a + row.record.j_b) > kConsistencyTol)
                throw std::runtime_error("heat currents do not balance");
            const HeatSplit sa = heat_current_split(Reservoir::a, ss, d, p.gamma);
            const HeatSplit sb = heat_current_split(Reservoir::b, ss, d, p.gamma);
            row.record.j_a_p = sa.population;
            row.record.j_a_c = sa.coherence;
            row.record.j_b_p = sb.population;
            row.record.j_b_c = sb.coherence;
            if (wanted & kOutEpr) {
                row.record.epr =
                    entropy_production_rate(row.record.j_a, row.record.j_b, p.t_a, p.t_b);
                if (row.record.epr < -kConsistencyTol)
                    throw std::runtime_error("negative entropy production");
            }
        } catch (const std::exception& e) {
            note(kOutCurrents | kOutEpr, e);
        }
    }
    if (wanted & kOutQfi) {
        try {
            QfiOptions opts;
            opts.step = config.qfi_step;
            row.record.qfi = qfi_lambda(p, opts);
        } catch (const std::exception& e) {
            note(kOutQfi, e);
        }
    }
    return row;
}

}  // namespace

std::uint32_t parse_outputs(const std::string& spec) {
    std::uint32_t mask = 0;
    std::stringstream stream(spec);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        if (token == "coherence")
            mask |= kOutCoherence;
        else if (token == "qfi")
            mask |= kOutQfi;
        else if (token == "j_curl")
            mask |= kOutCurl;
        else if (token == "j_a" || token == "j_b" || token == "j_a_p" || token == "j_b_p" ||
                 token == "j_a_c" || token == "j_b_c")
            mask |= kOutCurrents;
        else if (token == "epr")
            mask |= kOutEpr;
        else
            throw std::invalid_argument("unknown output column: " + token);
    }
    if (mask == 0) throw std::invalid_argument("empty output selection");
    return mask;
}

SweepAxis SweepAxis::linspace(std::string name, double min, double max, int count) {
    if (count < 2) throw std::invalid_argument("sweep axis needs at least 2 points");
    if (!(min < max)) throw std::invalid_argument("sweep axis needs min < max");
    SweepAxis axis;
    axis.name = std::move(name);
    axis.values.reserve(count);
    for (int i = 0; i < count; ++i)
        axis.values.push_back(min + (max - min) * double(i) / double(count - 1));
    return axis;
}

SweepAxis SweepAxis::explicit_values(std::string name, std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("sweep axis needs at least one value");
    SweepAxis axis;
    axis.name = std::move(name);
    axis.values = std::move(values);
    return axis;
}

void SweepConfig::validate() const {
    const auto check_name = [](const SweepAxis& axis) {
        if (axis.name != "delta_t" && axis.name != "lambda")
            throw std::invalid_argument("sweep axis must be 'delta_t' or 'lambda', got '" +
                                        axis.name + "'");
        if (axis.values.empty()) throw std::invalid_argument("sweep axis has no values");
    };
    check_name(axis1);
    if (axis2) {
        check_name(*axis2);
        if (axis2->name == axis1.name)
            throw std::invalid_argument("sweep axes must differ");
    }
    if (!(qfi_step > 0)) throw std::invalid_argument("qfi_step must be > 0");
    if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    for (double a1 : axis1.values) {
        if (axis2) {
            for (double a2 : axis2->values) params_at(*this, a1, a2, true).validate();
        } else {
            params_at(*this, a1, 0.0, false).validate();
        }
    }
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    config.validate();
    const bool has_axis2 = config.axis2.has_value();
    const std::size_t n2 = has_axis2 ? config.axis2->values.size() : 1;
    const std::size_t total = config.axis1.values.size() * n2;
    std::vector<SweepRow> rows(total);

    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const double a1 = config.axis1.values[idx / n2];
            const double a2 = has_axis2 ? config.axis2->values[idx % n2] : 0.0;
            rows[idx] = evaluate_row(config, a1, a2, has_axis2);
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(std::max(config.threads, 1), total);
    if (workers <= 1) {
        work(0, total);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (total + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(total, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& t : pool) t.join();
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     std::uint32_t outputs) {
    os << "delta_t,lambda,coherence_abs,qfi,j_curl,j_a,j_b,j_a_p,j_b_p,j_a_c,j_b_c,epr\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const SweepRow& row : rows) {
        const auto cell = [&](std::uint32_t bit, double v) {
            return ((outputs & bit) && !(row.failed & bit)) ? v : nan;
        };
        os << format_full(row.delta_t) << ',' << format_full(row.lambda) << ','
           << format_full(cell(kOutCoherence, row.record.coherence_abs)) << ','
           << format_full(cell(kOutQfi, row.record.qfi)) << ','
           << format_full(cell(kOutCurl, row.record.j_curl)) << ','
           << format_full(cell(kOutCurrents, row.record.j_a)) << ','
           << format_full(cell(kOutCurrents, row.record.j_b)) << ','
           << format_full(cell(kOutCurrents, row.record.j_a_p)) << ','
           << format_full(cell(kOutCurrents, row.record.j_b_p)) << ','
           << format_full(cell(kOutCurrents, row.record.j_a_c)) << ','
           << format_full(cell(kOutCurrents, row.record.j_b_c)) << ','
           << format_full(cell(kOutEpr, row.record.epr)) << '\n';
    }
}

SweepConfig preset_sweep(const std::string& name) {
    SweepConfig config;
    config.base = SystemParams{1.0, 0.1, 0.1, 0.2, 0.2};
    if (name == "fig2a" || name == "fig2b" || name == "fig3") {
        config.axis1 = SweepAxis::explicit_values("lambda", {0.1, 0.2, 0.4});
        config.axis2 = SweepAxis::linspace("delta_t", 0.0, 0.8, 81);
    } else if (name == "fig4") {
        config.axis1 = SweepAxis::linspace("lambda", 0.05, 0.5, 50);
        config.axis2 = SweepAxis::linspace("delta_t", 0.0, 0.8, 50);
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return config;
}

}  // namespace optmol
