// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <sys/wait.h>

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "siclab/channel.hpp"
#include "siclab/harness.hpp"
#include "siclab/metrics.hpp"
#include "siclab/rx.hpp"
#include "siclab/sic.hpp"
#include "siclab/waveform.hpp"
#include "support.hpp"

using namespace siclab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char b[64];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

// Dense Toeplitz regressor with zero initial state.
Eigen::MatrixXcd dense_regressor(const ComplexVector& x, int taps) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(n, taps);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index k = 0; k < taps && k <= r; ++k) X(r, k) = x[static_cast<std::size_t>(r - k)];
    return X;
}

Outcome ls_oracle_equivalence() {
    const auto t0 = Clock::now();
    constexpr std::size_t n = 4096;
    constexpr int taps = 32;
    double worst_alpha = 0.0, worst_fir = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto x = testsupport::random_vector(n, 1000 + i);
        const auto h = testsupport::random_vector(6, 2000 + i);
        auto y = testsupport::conv_oracle(h, x);
        const auto w = testsupport::random_vector(n, 3000 + i, 0.05);
        for (std::size_t k = 0; k < n; ++k) y[k] += w[k];

        const Complex alpha = sic::estimate_alpha(x, y);
        const double xx = testsupport::dot_oracle(x, x).real();
        const Complex alpha_ref = testsupport::dot_oracle(x, y) / (xx + 1e-12 * xx);
        worst_alpha = std::max(worst_alpha, testsupport::rel_err(alpha, alpha_ref));

        ComplexVector xs(n);
        for (std::size_t k = 0; k < n; ++k) xs[k] = alpha * x[k];
        const sic::SicConfig cfg;
        const auto est = sic::fit_fir(xs, y, cfg);

        const Eigen::MatrixXcd X = dense_regressor(xs, taps);
        const Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(n));
        Eigen::MatrixXcd A = X.adjoint() * X;
        A.diagonal().array() += est.lambda_used;
        const Eigen::VectorXcd h_ref = A.fullPivLu().solve(X.adjoint() * yv);
        const Eigen::Map<const Eigen::VectorXcd> hv(est.taps.data(), taps);
        worst_fir = std::max(worst_fir, (hv - h_ref).norm() / h_ref.norm());
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = worst_alpha <= 1e-10 && worst_fir <= 1e-8 && t < 10.0;
    o.detail = "max alpha rel err " + fmt("%.2e", worst_alpha) + ", max FIR rel err " + fmt("%.2e", worst_fir) + ", " +
               fmt("%.2f", t) + " s";
    return o;
}

Outcome exact_model_cancellation() {
    const auto t0 = Clock::now();
    double worst = 1e9;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto ref = testsupport::random_vector(20000, 500 + s);
        auto h = testsupport::random_vector(3, 600 + s);
        const std::size_t delay = 50 + 37 * s;
        ComplexVector shifted(ref.size() + delay);
        std::copy(ref.begin(), ref.end(), shifted.begin() + static_cast<std::ptrdiff_t>(delay));
        const auto cap = testsupport::conv_oracle(h, shifted);
        const auto res = sic::run_sic(IqBuffer(cap, 20e6), IqBuffer(ref, 20e6));
        worst = std::min(worst, res.depth.db);
    }
    const double t = seconds_since(t0);
    return {worst >= 60.0 && t < 30.0, "min depth " + fmt("%.1f", worst) + " dB over 50 seeds, " + fmt("%.2f", t) + " s"};
}

Outcome metric_identities() {
    using namespace metrics;
    const auto r = testsupport::random_vector(2048, 7);
    ComplexVector s = r, tenth = r, inv_ratio = r;
    for (auto& v : s) v *= 1.1;
    for (auto& v : tenth) v /= std::sqrt(10.0);
    for (auto& v : inv_ratio) v /= std::sqrt(15.42);
    const IqBuffer rb(r, 1.0);

    std::vector<std::uint8_t> bits(1000), flipped(1000);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = static_cast<std::uint8_t>((i * 7 + i / 3) & 1U);
        flipped[i] = bits[i] ^ 1U;
    }
    const Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(36, 14);
    ResourceGrid g(36, 14), g10(36, 14), g22(36, 14);
    g.values = h;
    g10.values = h / 10.0;
    g22.values = h / 22.28;

    const double tol = 1e-12;
    bool ok = true;
    std::string failed;
    auto check = [&](bool c, const char* what) {
        if (!c) {
            ok = false;
            failed += std::string(" ") + what;
        }
    };
    check(evm_rms(r, r) == 0.0, "evm0");
    check(std::abs(evm_rms(s, r) - 10.0) < tol, "evm10");
    check(ber(bits, bits).ratio == 0.0, "ber0");
    check(ber(flipped, bits).ratio == 1.0, "ber1");
    check(sic_depth(rb, rb).db == 0.0, "depth0");
    check(std::abs(sic_depth(rb, IqBuffer(tenth, 1.0)).db - 10.0) < tol, "depth10");
    check(channel_suppression(g, g).db == 0.0, "supp0");
    check(std::abs(channel_suppression(g, g10).db - 20.0) < tol, "supp20");
    const double d = sic_depth(rb, IqBuffer(inv_ratio, 1.0)).db;
    const double sh = channel_suppression(g, g22).db;
    check(std::abs(d - 11.88) < 0.01, "depth11.88");
    check(std::abs(sh - 26.96) < 0.01, "supp26.96");
    return {ok, "depth(15.42) = " + fmt("%.4f", d) + " dB, suppression(22.28) = " + fmt("%.4f", sh) + " dB" +
                    (ok ? "" : ", failed:" + failed)};
}

Outcome evm_snr_law() {
    waveform::NrConfig cfg;
    cfg.slots = 10;
    const auto f = waveform::generate_nr_frame(cfg, 4242);
    const double p = f.waveform.mean_power();
    bool ok = true;
    std::string detail;
    for (double snr_db : {20.0, 30.0, 40.0}) {
        const double snr = std::pow(10.0, snr_db / 10.0);
        const double sigma2 = p * cfg.fft_size() / (cfg.subcarriers() * snr);
        const auto w = channel::awgn(f.waveform.size(), sigma2, static_cast<std::uint64_t>(snr_db));
        ComplexVector noisy = f.waveform.vector();
        for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += w[i];
        const auto r = rx::demod_nr(IqBuffer(noisy, cfg.native_rate), cfg, f.grid, f.bits);
        const double expect = 100.0 / std::sqrt(snr);
        const double got = r.evm_percent.value_or(1e9);
        const double rel = std::abs(got - expect) / expect;
        ok = ok && rel <= 0.10 && r.equalized.size() >= 100000;
        detail += fmt("%.0f dB: ", snr_db) + fmt("%.3f%%", got) + " vs " + fmt("%.3f%%", expect) + "; ";
    }
    detail += std::to_string(cfg.total_symbols()) + " OFDM symbols per point";
    return {ok, detail};
}

Outcome table2_trend() {
    const auto t0 = Clock::now();
    auto cfg = harness::default_sweep();
    harness::apply_preset(cfg, "table2");
    harness::apply_preset(cfg, "ci");
    const auto recs = harness::sweep(cfg, 1);

    struct Acc {
        double wifi = 0.0, nr = 0.0;
        int nw = 0, nn = 0, seeds = 0, composite_fail_residual_ok = 0;
    };
    std::map<std::string, Acc> acc;
    int failures = 0;
    for (const auto& r : recs) {
        auto& a = acc[r.channel_case];
        ++a.seeds;
        if (!r.ok()) ++failures;
        if (r.wifi_evm_pct) a.wifi += *r.wifi_evm_pct, ++a.nw;
        if (r.nr_evm_pct) a.nr += *r.nr_evm_pct, ++a.nn;
        if (!r.wifi_composite_decode && r.wifi_residual_decode) ++a.composite_fail_residual_ok;
    }
    std::string detail;
    double wmin = 1e9, wmax = -1e9, nmin = 1e9, nmax = -1e9;
    bool a_ok = true;
    const double nofading = acc["NoFading"].nw ? acc["NoFading"].wifi / acc["NoFading"].nw : 1e9;
    for (const auto& c : cfg.channel_cases) {
        const auto& a = acc[c.name];
        const double w = a.nw ? a.wifi / a.nw : 1e9;
        const double n = a.nn ? a.nr / a.nn : 1e9;
        wmin = std::min(wmin, w), wmax = std::max(wmax, w);
        nmin = std::min(nmin, n), nmax = std::max(nmax, n);
        if (c.name != "NoFading" && !(nofading < w)) a_ok = false;
        detail += c.name + " wifi " + fmt("%.2f%%", w) + " nr " + fmt("%.2f%%", n) + "; ";
    }
    const auto& nf = acc["NoFading"];
    const bool b_ok = nf.seeds >= 20 && nf.composite_fail_residual_ok * 10 >= nf.seeds * 9;
    const bool c_ok = (nmax - nmin) < (wmax - wmin);
    const double t = seconds_since(t0);
    detail += "(a) " + std::string(a_ok ? "ok" : "no") + ", (b) " + std::to_string(nf.composite_fail_residual_ok) + "/" +
              std::to_string(nf.seeds) + ", (c) nr spread " + fmt("%.2f", nmax - nmin) + " vs wifi spread " +
              fmt("%.2f", wmax - wmin) + ", " + fmt("%.1f", t) + " s";
    const bool seeds_ok = cfg.seeds_per_point >= 20;
    return {a_ok && b_ok && c_ok && seeds_ok && failures == 0 && t < 300.0, detail};
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome sweep_determinism() {
    const auto t0 = Clock::now();
    const auto dir = fs::temp_directory_path() / "siclab_acceptance";
    fs::remove_all(dir);
    const auto p8 = dir / "p8";
    const auto p1 = dir / "p1";
    const std::string cli = SICLAB_CLI;
    const int e8 = run_command(cli + " run --preset table2 --parallel 8 --out " + p8.string() + " 2>/dev/null");
    const int e1 = run_command(cli + " run --preset table2 --parallel 1 --out " + p1.string() + " 2>/dev/null");
    const auto a = slurp(p8 / "report.csv");
    const auto b = slurp(p1 / "report.csv");
    const bool same = !a.empty() && a == b;
    const auto lines = static_cast<long>(std::count(a.begin(), a.end(), '\n'));
    return {e8 == 0 && e1 == 0 && same,
            "exit codes " + std::to_string(e8) + "/" + std::to_string(e1) + ", " + std::to_string(lines) + " CSV lines, " +
                (same ? "byte-identical" : "DIFFERENT") + ", " + fmt("%.1f", seconds_since(t0)) + " s"};
}

Outcome delay_cfo_recovery() {
    // Integer delays.
    const auto ref = testsupport::random_vector(8192, 77);
    bool delays_ok = true;
    for (std::size_t d : {0u, 1u, 7u, 120u, 2000u, 4095u, 5003u, 9999u, 10000u}) {
        ComplexVector cap(ref.size() + 10000 + 500);
        const auto noise = testsupport::random_vector(cap.size(), 78 + d, 0.01);
        for (std::size_t i = 0; i < cap.size(); ++i) cap[i] = noise[i];
        for (std::size_t i = 0; i < ref.size(); ++i) cap[i + d] += ref[i];
        const auto est = sic::estimate_delay(IqBuffer(ref, 20e6), IqBuffer(cap, 20e6), 10000);
        delays_ok = delays_ok && est.delay_samples == d && est.confident;
    }

    // CFO at 40 dB SNR.
    waveform::WifiConfig wcfg;
    wcfg.packets_per_burst = 1;
    int coarse_ok = 0, fine_ok = 0;
    double worst_coarse = 0.0, worst_fine = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto b = waveform::generate_wifi_burst(wcfg, 9000 + t);
        channel::ImpairmentSpec imp;
        imp.cfo_hz = 5000.0;
        imp.delay_samples = 200 + 13 * t;
        imp.noise_power_dbfs = 10.0 * std::log10(b.waveform.mean_power()) - 40.0;
        imp.gain = std::polar(1.0, 0.1 * static_cast<double>(t));
        auto cap = channel::apply_impairments(b.waveform, imp, 9100 + t);
        const auto tail = channel::awgn(400, std::pow(10.0, *imp.noise_power_dbfs / 10.0), 9200 + t);
        ComplexVector padded = cap.vector();
        padded.insert(padded.end(), tail.begin(), tail.end());
        const IqBuffer capture(padded, wcfg.sample_rate());

        const auto det = rx::detect_wifi_packets(capture, wcfg);
        if (det.size() == 1) {
            const double e = std::abs(det[0].coarse_cfo_hz - 5000.0);
            worst_coarse = std::max(worst_coarse, e);
            coarse_ok += e <= 200.0;
        } else {
            worst_coarse = 1e9;
        }
        const auto r = rx::demod_wifi(capture, wcfg, b.bits);
        if (r.packets.size() == 1) {
            const double e = std::abs(r.packets[0].fine_cfo_hz - 5000.0);
            worst_fine = std::max(worst_fine, e);
            fine_ok += e <= 20.0;
        } else {
            worst_fine = 1e9;
        }
    }
    return {delays_ok && coarse_ok == 100 && fine_ok == 100,
            std::string("delays ") + (delays_ok ? "exact" : "WRONG") + "; coarse " + std::to_string(coarse_ok) +
                "/100 (worst " + fmt("%.1f", worst_coarse) + " Hz), fine " + std::to_string(fine_ok) + "/100 (worst " +
                fmt("%.2f", worst_fine) + " Hz)"};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 LS oracle equivalence", ls_oracle_equivalence},
        {"2 exact-model cancellation", exact_model_cancellation},
        {"3 metric identities", metric_identities},
        {"4 EVM-SNR law", evm_snr_law},
        {"5 channel-case trend reproduction", table2_trend},
        {"6 sweep determinism", sweep_determinism},
        {"7 delay/CFO recovery", delay_cfo_recovery},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
