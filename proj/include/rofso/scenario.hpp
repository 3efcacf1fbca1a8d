// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rofso/channel/chain.hpp"
#include "rofso/io/csv.hpp"
#include "rofso/io/iq.hpp"
#include "rofso/measure/aclr.hpp"
#include "rofso/measure/evm.hpp"
#include "rofso/measure/psd.hpp"
#include "rofso/numerology.hpp"
#include "rofso/ofdm.hpp"
#include "rofso/passband.hpp"
#include "rofso/rx/receiver.hpp"
#include "rofso/test_model.hpp"
#include "rofso/version.hpp"

namespace rofso {

/// Knobs the paper does not pin down; they are explicit so the reports can
/// label which numbers are tuned stand-ins.
struct PresetTuning {
    double awgn_snr_db = 30.0;        // lumped electrical SNR at the detector chain
    double laser_mod_gain_ma = 35.0;  // RMS drive current swing
    double path_loss_db = 20.0;       // wireless E2E scalar loss
    double bpf_half_bw_hz = 18e6;     // E2E bandpass half width around 622 MHz
    std::string response_csv;         // measured end-to-end response override
};

struct Scenario {
    std::string name = "scenario";
    TestModelId tm_id = TestModelId::TM1_1;
    double scs_hz = 30e3;
    double bandwidth_hz = 20e6;
    double carrier_hz = 627e6;
    double passband_rate_hz = 2.4576e9;
    std::size_t n_frames = 1;
    std::size_t tx_window_w = 64;
    std::string preset = "ideal";  // ideal | paper-fso | paper-fso-wireless | custom
    PresetTuning tuning;
    std::vector<StageEntry> custom_stages;  // used when preset == "custom"
    RxConfig rx;
    Limits limits;
    std::uint64_t master_seed = 1;
    std::string out_dir;
    bool write_captures = true;
};

struct ConformanceReport {
    nlohmann::ordered_json json;
    std::string text;
    bool overall_pass = false;
};

inline double round_to(double v, int digits) {
    const double s = std::pow(10.0, digits);
    return std::round(v * s) / s;
}

/// Resolve a preset name into a chain plus fidelity labels for the report.
inline std::pair<ChannelChain, std::map<std::string, std::string>> make_preset_chain(
    const std::string& preset, const PresetTuning& t, std::uint64_t chain_seed) {
    ChannelChain chain;
    chain.master_seed = chain_seed;
    std::map<std::string, std::string> fidelity;

    auto detector_fir = [&]() {
        ResponseFilterStage fir;
        if (!t.response_csv.empty()) {
            fir.response = load_response_csv(t.response_csv);
            fir.label = "e2e_response";
            fidelity["e2e_response"] = "measured-file:" + t.response_csv;
        } else {
            fir.response = single_pole_response(720e6, 1.2288e9);
            fir.label = "detector_lpf_720MHz";
            fidelity["detector_bandwidth_720MHz"] = "paper";
            fidelity["detector_response_shape"] = "synthetic-single-pole";
        }
        fir.n_taps = 255;
        return fir;
    };

    if (preset == "ideal") {
        // no impairments; the transmit windowing alone keeps leakage under
        // the ACLR cap
    } else if (preset == "paper-fso" || preset == "paper-fso-wireless") {
        QuantizerStage awg;
        awg.bits = 10;
        fidelity["awg_bits_10"] = "paper";

        LaserStage laser;
        laser.model.i_threshold_ma = 420.0;
        laser.model.slope_mw_per_ma = 21.0 / (670.0 - 420.0);
        laser.model.i_bias_ma = 545.0;
        laser.model.mod_gain_ma_per_unit = t.laser_mod_gain_ma;
        laser.normalize_drive = true;
        fidelity["laser_threshold_420mA"] = "paper";
        fidelity["laser_slope_from_PI_endpoints"] = "paper";
        fidelity["laser_bias_545mA"] = "synthetic-midpoint";
        fidelity["laser_mod_gain"] = "tuned";

        AmplifierStage ea;
        ea.model.gain_db = 30.0;
        ea.model.noise_figure_db = 6.0;
        fidelity["ea_30dB_6dB_NF"] = "paper";

        AwgnStage awgn;
        awgn.snr_db = t.awgn_snr_db;
        fidelity["electrical_snr"] = "tuned";

        QuantizerStage dso;
        dso.bits = 8;
        fidelity["dso_bits_8"] = "paper";

        chain.stages.push_back({awg});
        chain.stages.push_back({laser});
        chain.stages.push_back({detector_fir()});
        chain.stages.push_back({DcBlockStage{}});
        chain.stages.push_back({ea});
        chain.stages.push_back({awgn});
        if (preset == "paper-fso-wireless") {
            GainStage loss;
            loss.gain_db = -t.path_loss_db;
            fidelity["wireless_path_loss"] = "tuned";

            BandpassStage bpf;
            bpf.center_hz = 622e6;
            bpf.half_bw_hz = t.bpf_half_bw_hz;
            fidelity["bpf_center_622MHz"] = "paper";
            fidelity["bpf_width"] = "synthetic";

            AmplifierStage rx_ea;
            rx_ea.model.gain_db = 30.0;
            rx_ea.model.noise_figure_db = 6.0;
            fidelity["rx_ea_30dB_6dB_NF"] = "paper";

            chain.stages.push_back({loss});
            chain.stages.push_back({bpf});
            chain.stages.push_back({rx_ea});
        }
        chain.stages.push_back({dso});
    } else {
        throw ConfigError("unknown preset: " + preset);
    }
    return {chain, fidelity};
}

namespace detail {

inline nlohmann::ordered_json stage_to_json(const StageEntry& e) {
    nlohmann::ordered_json j;
    struct V {
        nlohmann::ordered_json& j;
        void operator()(const QuantizerStage& s) {
            j["type"] = "quantizer";
            j["bits"] = s.bits;
            if (s.full_scale > 0.0) j["full_scale"] = s.full_scale;
            else j["full_scale_rms_mult"] = s.full_scale_rms_mult;
        }
        void operator()(const LaserStage& s) {
            j["type"] = "laser";
            j["i_threshold_ma"] = s.model.i_threshold_ma;
            j["slope_mw_per_ma"] = s.model.slope_mw_per_ma;
            j["i_bias_ma"] = s.model.i_bias_ma;
            j["mod_gain_ma_per_unit"] = s.model.mod_gain_ma_per_unit;
            j["normalize_drive"] = s.normalize_drive;
        }
        void operator()(const ResponseFilterStage& s) {
            j["type"] = "fir";
            j["label"] = s.label;
            j["n_taps"] = s.n_taps;
            nlohmann::ordered_json pts = nlohmann::ordered_json::array();
            for (const auto& p : s.response.points) {
                nlohmann::ordered_json row = {p.freq_hz, p.mag_db};
                if (p.phase_deg) row.push_back(*p.phase_deg);
                pts.push_back(row);
            }
            j["response"] = pts;
        }
        void operator()(const BandpassStage& s) {
            j["type"] = "bandpass";
            j["center_hz"] = s.center_hz;
            j["half_bw_hz"] = s.half_bw_hz;
            j["transition_hz"] = s.transition_hz;
            j["atten_db"] = s.atten_db;
        }
        void operator()(const AmplifierStage& s) {
            j["type"] = "amplifier";
            j["gain_db"] = s.model.gain_db;
            j["nf_db"] = s.model.noise_figure_db;
        }
        void operator()(const AwgnStage& s) {
            j["type"] = "awgn";
            j["snr_db"] = s.snr_db;
        }
        void operator()(const GainStage& s) {
            j["type"] = "gain";
            j["gain_db"] = s.gain_db;
        }
        void operator()(const DcBlockStage&) { j["type"] = "dc_block"; }
        void operator()(const ResampleStage& s) {
            j["type"] = "resample";
            j["rate_hz"] = s.rate_hz;
        }
        void operator()(const BrickwallStage& s) {
            j["type"] = "brickwall";
            j["f_lo_hz"] = s.f_lo_hz;
            j["f_hi_hz"] = s.f_hi_hz;
        }
    };
    std::visit(V{j}, e.op);
    if (e.expect_input_rate_hz > 0.0) j["expect_input_rate_hz"] = e.expect_input_rate_hz;
    return j;
}

inline StageEntry stage_from_json(const nlohmann::json& j) {
    StageEntry e;
    const std::string type = j.at("type");
    if (type == "quantizer") {
        QuantizerStage s;
        s.bits = j.value("bits", 10u);
        s.full_scale = j.value("full_scale", 0.0);
        s.full_scale_rms_mult = j.value("full_scale_rms_mult", 4.0);
        e.op = s;
    } else if (type == "laser") {
        LaserStage s;
        s.model.i_threshold_ma = j.value("i_threshold_ma", 420.0);
        s.model.slope_mw_per_ma = j.value("slope_mw_per_ma", 0.084);
        s.model.i_bias_ma = j.value("i_bias_ma", 545.0);
        s.model.mod_gain_ma_per_unit = j.value("mod_gain_ma_per_unit", 35.0);
        s.normalize_drive = j.value("normalize_drive", true);
        e.op = s;
    } else if (type == "fir") {
        ResponseFilterStage s;
        s.label = j.value("label", std::string("fir"));
        s.n_taps = j.value("n_taps", std::size_t{255});
        if (j.contains("response_csv")) {
            s.response = load_response_csv(j["response_csv"]);
        } else if (j.contains("f3db_hz")) {
            s.response = single_pole_response(j["f3db_hz"], j.value("f_max_hz", 1.2288e9));
        } else if (j.contains("response")) {
            for (const auto& row : j["response"]) {
                FrequencyResponse::Point p;
                p.freq_hz = row.at(0);
                p.mag_db = row.at(1);
                if (row.size() > 2) p.phase_deg = row.at(2);
                s.response.points.push_back(p);
            }
        } else {
            throw ConfigError("fir stage needs response_csv, f3db_hz, or response");
        }
        e.op = s;
    } else if (type == "bandpass") {
        BandpassStage s;
        s.center_hz = j.at("center_hz");
        s.half_bw_hz = j.at("half_bw_hz");
        s.transition_hz = j.value("transition_hz", 6e6);
        s.atten_db = j.value("atten_db", 50.0);
        e.op = s;
    } else if (type == "amplifier") {
        AmplifierStage s;
        s.model.gain_db = j.value("gain_db", 30.0);
        s.model.noise_figure_db = j.value("nf_db", 6.0);
        e.op = s;
    } else if (type == "awgn") {
        AwgnStage s;
        s.snr_db = j.value("snr_db", 30.0);
        e.op = s;
    } else if (type == "gain") {
        e.op = GainStage{j.value("gain_db", 0.0)};
    } else if (type == "dc_block") {
        e.op = DcBlockStage{};
    } else if (type == "resample") {
        e.op = ResampleStage{j.at("rate_hz")};
    } else if (type == "brickwall") {
        e.op = BrickwallStage{j.at("f_lo_hz"), j.at("f_hi_hz")};
    } else {
        throw ConfigError("unknown stage type: " + type);
    }
    e.expect_input_rate_hz = j.value("expect_input_rate_hz", 0.0);
    return e;
}

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    if (j.contains("tm")) s.tm_id = test_model_from_string(j["tm"]);
    s.scs_hz = j.value("scs_hz", 30e3);
    s.bandwidth_hz = j.value("bandwidth_hz", 20e6);
    s.carrier_hz = j.value("carrier_hz", 627e6);
    s.passband_rate_hz = j.value("passband_rate_hz", 2.4576e9);
    s.n_frames = j.value("frames", std::size_t{1});
    s.tx_window_w = j.value("tx_window", std::size_t{64});
    s.preset = j.value("preset", std::string("ideal"));
    s.master_seed = j.value("seed", std::uint64_t{1});
    s.out_dir = j.value("out_dir", std::string());
    s.write_captures = j.value("write_captures", true);

    if (j.contains("tuning")) {
        const auto& t = j["tuning"];
        s.tuning.awgn_snr_db = t.value("awgn_snr_db", s.tuning.awgn_snr_db);
        s.tuning.laser_mod_gain_ma = t.value("laser_mod_gain_ma", s.tuning.laser_mod_gain_ma);
        s.tuning.path_loss_db = t.value("path_loss_db", s.tuning.path_loss_db);
        s.tuning.bpf_half_bw_hz = t.value("bpf_half_bw_hz", s.tuning.bpf_half_bw_hz);
        s.tuning.response_csv = t.value("response_csv", s.tuning.response_csv);
    }
    if (j.contains("chain")) {
        s.preset = "custom";
        for (const auto& st : j["chain"]) s.custom_stages.push_back(detail::stage_from_json(st));
    }
    if (j.contains("rx")) {
        const auto& r = j["rx"];
        const std::string cr = r.value("carrier_recovery", std::string("auto"));
        s.rx.carrier_recovery = (cr == "costas") ? CarrierRecovery::Costas
                                : (cr == "nco")  ? CarrierRecovery::NcoFallback
                                                 : CarrierRecovery::Auto;
        s.rx.costas.loop_bandwidth_hz = r.value("loop_bandwidth_hz", 500.0);
        s.rx.costas.damping = r.value("damping", s.rx.costas.damping);
        s.rx.costas.prefilter_bw_hz = r.value("prefilter_bw_hz", s.rx.costas.prefilter_bw_hz);
        s.rx.chanest.average_slots = r.value("average_slots", true);
        s.rx.zf.gain_floor_rel = r.value("zf_gain_floor_rel", s.rx.zf.gain_floor_rel);
    }
    if (j.contains("limits")) {
        const auto& l = j["limits"];
        s.limits.aclr_min_db = l.value("aclr_min_db", 44.2);
        if (l.contains("evm")) {
            for (const auto& [key, tiers] : l["evm"].items()) {
                s.limits.evm_max_pct[static_cast<unsigned>(std::stoul(key))] = {tiers.at(0),
                                                                                tiers.at(1)};
            }
        }
    }
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open scenario config: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad scenario JSON: " + std::string(e.what()));
    }
    return scenario_from_json(j);
}

/// Generate -> upconvert -> channel -> receive -> measure -> evaluate, with
/// artifacts written under out_dir when set.
inline ConformanceReport run_scenario(const Scenario& sc) {
    const auto num = make_numerology(sc.scs_hz, sc.bandwidth_hz);
    CarrierConfig carrier = default_carrier(num, sc.carrier_hz, sc.passband_rate_hz);

    TestModelSpec tm = make_test_model(sc.tm_id, num);
    tm.prbs_seed = static_cast<std::uint32_t>(derive_seed(sc.master_seed, 0x10) & 0x7fffff) | 1u;
    tm.dmrs.seed = static_cast<std::uint32_t>(derive_seed(sc.master_seed, 0x11) & 0x7fffff) | 1u;

    auto [chain, fidelity] = (sc.preset == "custom")
                                 ? std::pair<ChannelChain, std::map<std::string, std::string>>{
                                       ChannelChain{sc.custom_stages,
                                                    derive_seed(sc.master_seed, 0x20)},
                                       {{"chain", "custom"}}}
                                 : make_preset_chain(sc.preset, sc.tuning,
                                                     derive_seed(sc.master_seed, 0x20));

    const auto grid = build_test_model_grid(tm, num, sc.n_frames);
    auto bb = ofdm_modulate(grid.symbols, num, sc.tx_window_w);
    bb.meta.seed = sc.master_seed;
    bb.meta.description = to_string(sc.tm_id) + " baseband";
    auto pb = upconvert_to_passband(bb, carrier);
    pb.meta.description = to_string(sc.tm_id) + " passband";

    const auto out = run_chain(pb, chain);

    const auto aclr = measure_aclr(out, carrier);
    const auto rx = rx_receive(out, num, carrier, grid, tm, sc.rx);
    const auto evm = measure_evm(rx.eq.grid, grid, tm.modulation, &rx.eq.re_valid);
    const auto verdicts =
        evaluate_limits(std::optional<AclrResult>(aclr), std::optional<EvmResult>(evm), tm,
                        sc.limits);

    // report
    nlohmann::ordered_json j;
    j["tool"] = "rofso";
    j["version"] = kVersion;
    nlohmann::ordered_json jsc;
    jsc["name"] = sc.name;
    jsc["tm"] = to_string(sc.tm_id);
    jsc["scs_hz"] = sc.scs_hz;
    jsc["bandwidth_hz"] = sc.bandwidth_hz;
    jsc["carrier_hz"] = sc.carrier_hz;
    jsc["passband_rate_hz"] = sc.passband_rate_hz;
    jsc["frames"] = sc.n_frames;
    jsc["tx_window"] = sc.tx_window_w;
    jsc["preset"] = sc.preset;
    jsc["seed"] = sc.master_seed;
    jsc["prbs_seed"] = tm.prbs_seed;
    jsc["dmrs_seed"] = tm.dmrs.seed;
    nlohmann::ordered_json jtun;
    jtun["awgn_snr_db"] = sc.tuning.awgn_snr_db;
    jtun["laser_mod_gain_ma"] = sc.tuning.laser_mod_gain_ma;
    jtun["path_loss_db"] = sc.tuning.path_loss_db;
    jtun["bpf_half_bw_hz"] = sc.tuning.bpf_half_bw_hz;
    jsc["tuning"] = jtun;
    nlohmann::ordered_json jst = nlohmann::ordered_json::array();
    for (const auto& e : chain.stages) jst.push_back(detail::stage_to_json(e));
    jsc["chain"] = jst;
    j["scenario"] = jsc;
    j["fidelity"] = fidelity;
    j["noise_convention"] =
        "amplifier noise power referred to input = kT*B*(F-1), B = stage sample rate, unit "
        "impedance, T = 290 K";
    j["carrier_recovery_path"] = rx.carrier_path;
    nlohmann::ordered_json jsync;
    jsync["start_index"] = rx.sync.start_index;
    jsync["cfo_hz"] = round_to(rx.sync.cfo_hz, 3);
    jsync["peak_metric"] = round_to(rx.sync.peak_metric, 4);
    j["sync"] = jsync;
    nlohmann::ordered_json jpow = nlohmann::ordered_json::array();
    for (const auto& sp : out.meta.stage_powers) {
        nlohmann::ordered_json row;
        row["stage"] = sp.stage;
        row["power"] = sp.power;
        jpow.push_back(row);
    }
    j["stage_powers"] = jpow;

    nlohmann::ordered_json ja;
    ja["aclr_lower_db"] = round_to(aclr.aclr_lower_db, 2);
    ja["aclr_upper_db"] = round_to(aclr.aclr_upper_db, 2);
    ja["capped_lower"] = aclr.capped_lower;
    ja["capped_upper"] = aclr.capped_upper;
    ja["integration_bw_hz"] = aclr.integration_bw_hz;
    ja["channel_spacing_hz"] = aclr.channel_spacing_hz;
    ja["cap_db"] = kAclrCapDb;
    j["aclr"] = ja;

    nlohmann::ordered_json je;
    je["rms_pct"] = round_to(evm.rms_pct, 3);
    je["n_res"] = evm.n_res;
    std::vector<double> sorted = evm.per_subcarrier_pct;
    std::sort(sorted.begin(), sorted.end());
    je["median_subcarrier_pct"] = round_to(sorted[sorted.size() / 2], 3);
    je["dc_subcarrier_pct"] =
        round_to(evm.per_subcarrier_pct[evm.per_subcarrier_pct.size() / 2], 3);
    je["modulation"] = tm.modulation;
    j["evm"] = je;

    nlohmann::ordered_json jv = nlohmann::ordered_json::array();
    bool all_pass = true;
    std::string text;
    text += "rofso conformance report (" + sc.name + ")\n";
    text += "test model " + to_string(sc.tm_id) + ", preset " + sc.preset + ", seed " +
            std::to_string(sc.master_seed) + "\n";
    text += "carrier recovery: " + rx.carrier_path + "\n";
    for (const auto& v : verdicts) {
        nlohmann::ordered_json row;
        row["test"] = v.test;
        row["tier"] = v.tier;
        row["measured"] = round_to(v.measured, 3);
        row["limit"] = v.limit;
        row["margin"] = round_to(v.margin, 3);
        row["pass"] = v.pass;
        jv.push_back(row);
        all_pass = all_pass && v.pass;
        char line[160];
        std::snprintf(line, sizeof(line), "%-12s %-12s measured %9.3f  limit %8.3f  margin %+8.3f  %s\n",
                      v.test.c_str(), v.tier.c_str(), round_to(v.measured, 3), v.limit,
                      round_to(v.margin, 3), v.pass ? "PASS" : "FAIL");
        text += line;
    }
    j["verdicts"] = jv;
    j["overall_pass"] = all_pass;
    text += std::string("overall: ") + (all_pass ? "PASS" : "FAIL") + "\n";

    ConformanceReport report;
    report.json = std::move(j);
    report.text = text;
    report.overall_pass = all_pass;

    if (!sc.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(sc.out_dir);
        const std::string base = sc.out_dir + "/";
        {
            std::ofstream f(base + "report.json");
            f << report.json.dump(2) << "\n";
        }
        {
            std::ofstream f(base + "report.txt");
            f << report.text;
        }
        if (sc.write_captures) {
            write_iq(bb, base + "tx_baseband.iq", base + "tx_baseband.json");
            write_iq(out, base + "capture.iq", base + "capture.json");
        }
        const auto psd = welch_psd(out, 32768);
        write_psd_csv(psd, base + "psd.csv");
        write_constellation_csv(rx.eq.grid, base + "constellation.csv");
        write_per_subcarrier_evm_csv(evm, base + "per_subcarrier_evm.csv");
        if (!rx.estimates.empty())
            write_channel_estimate_csv(rx.estimates.front(), base + "channel_estimate.csv");
        if (!rx.costas_trace_index.empty())
            write_trace_csv(rx.costas_trace_index, rx.costas_trace_freq_hz,
                            base + "costas_trace.csv");
    }
    return report;
}

}  // namespace rofso
