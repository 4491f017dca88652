#include "modalshm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace modalshm::io {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::runtime_error("io: cannot open '" + file.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& file, const std::string& bytes) {
    if (file.has_parent_path()) {
        std::filesystem::create_directories(file.parent_path());
    }
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("io: cannot write '" + file.string() + "'");
    }
    out << bytes;
    if (!out) {
        throw std::runtime_error("io: short write to '" + file.string() + "'");
    }
}

double parse_double(std::string_view text, const std::filesystem::path& file) {
    double value = 0.0;
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::runtime_error("io: malformed number '" + std::string(text) + "' in " +
                                 file.string());
    }
    return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

/// Minimal deterministic JSON emitter: insertion field order, LF endings,
/// doubles at 17 significant digits.
class JsonWriter {
public:
    explicit JsonWriter(std::string& out) : out_(out) {}

    void begin_object() { separator(); out_ += '{'; fresh_ = true; }
    void end_object() { out_ += '}'; fresh_ = false; }
    void begin_array() { separator(); out_ += '['; fresh_ = true; }
    void end_array() { out_ += ']'; fresh_ = false; }

    void key(std::string_view name) {
        separator();
        string_token(name);
        out_ += ':';
        fresh_ = true;
    }
    void value(double number) { separator(); out_ += format_double(number); fresh_ = false; }
    void value(long long number) { separator(); out_ += std::to_string(number); fresh_ = false; }
    void value(int number) { value(static_cast<long long>(number)); }
    void value(std::uint64_t number) { separator(); out_ += std::to_string(number); fresh_ = false; }
    void value(std::string_view text) { separator(); string_token(text); fresh_ = false; }

private:
    void separator() {
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
            out_.back() != ':') {
            out_ += ',';
        }
        fresh_ = false;
    }
    void string_token(std::string_view text) {
        out_ += '"';
        for (char c : text) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default: out_ += c;
            }
        }
        out_ += '"';
    }

    std::string& out_;
    bool fresh_ = true;
};

void write_channel(JsonWriter& w, const ChannelMeta& meta) {
    w.begin_object();
    w.key("id");
    w.value(meta.id);
    w.key("kind");
    w.value(to_string(meta.kind));
    w.key("node_label");
    w.value(meta.node_label);
    w.key("direction");
    w.value(to_string(meta.direction));
    w.key("sensitivity_note");
    w.value(meta.sensitivity_note);
    w.end_object();
}

ChannelMeta parse_channel(const json& j) {
    ChannelMeta meta;
    meta.id = j.at("id").get<std::string>();
    meta.kind = channel_kind_from_string(j.at("kind").get<std::string>());
    meta.node_label = j.value("node_label", std::string{});
    meta.direction = direction_from_string(j.value("direction", std::string{"other"}));
    meta.sensitivity_note = j.value("sensitivity_note", std::string{});
    return meta;
}

json load_json(const std::filesystem::path& file) {
    json parsed = json::parse(read_file(file), nullptr, true, false);
    return parsed;
}

}  // namespace

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_time_series(const std::filesystem::path& dir, const TimeSeriesSet& ts) {
    std::string meta;
    JsonWriter w(meta);
    w.begin_object();
    w.key("sample_rate_hz");
    w.value(ts.sample_rate_hz());
    w.key("n_samples");
    w.value(static_cast<long long>(ts.n_samples()));
    w.key("channels");
    w.begin_array();
    for (const auto& channel : ts.channels()) write_channel(w, channel);
    w.end_array();
    w.end_object();
    meta += '\n';
    write_file(dir / "meta.json", meta);

    std::string csv;
    csv.reserve(static_cast<std::size_t>(ts.n_samples()) *
                static_cast<std::size_t>(ts.n_channels() + 1) * 26);
    csv += "t";
    for (const auto& channel : ts.channels()) {
        csv += ',';
        csv += channel.id;
    }
    csv += '\n';
    for (Eigen::Index k = 0; k < ts.n_samples(); ++k) {
        csv += format_double(static_cast<double>(k) / ts.sample_rate_hz());
        for (Eigen::Index c = 0; c < ts.n_channels(); ++c) {
            csv += ',';
            csv += format_double(ts.samples()(c, k));
        }
        csv += '\n';
    }
    write_file(dir / "ts.csv", csv);
}

TimeSeriesSet read_time_series(const std::filesystem::path& dir) {
    const json meta = load_json(dir / "meta.json");
    const double fs = meta.at("sample_rate_hz").get<double>();
    std::vector<ChannelMeta> channels;
    for (const auto& j : meta.at("channels")) channels.push_back(parse_channel(j));

    const std::filesystem::path csv_path = dir / "ts.csv";
    const std::string csv = read_file(csv_path);
    std::istringstream lines(csv);
    std::string line;
    if (!std::getline(lines, line)) {
        throw std::runtime_error("io: empty time series file " + csv_path.string());
    }
    const auto header = split_csv_line(line);
    if (header.size() != channels.size() + 1 || header[0] != "t") {
        throw std::runtime_error("io: time series header does not match metadata in " +
                                 csv_path.string());
    }
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (header[c + 1] != channels[c].id) {
            throw std::runtime_error("io: channel order mismatch in " + csv_path.string());
        }
    }

    std::vector<double> flat;
    Eigen::Index n_samples = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != channels.size() + 1) {
            throw std::runtime_error("io: ragged row in " + csv_path.string());
        }
        for (std::size_t c = 0; c < channels.size(); ++c) {
            flat.push_back(parse_double(fields[c + 1], csv_path));
        }
        ++n_samples;
    }
    Eigen::MatrixXd samples(channels.size(), n_samples);
    for (Eigen::Index k = 0; k < n_samples; ++k) {
        for (std::size_t c = 0; c < channels.size(); ++c) {
            samples(static_cast<Eigen::Index>(c), k) =
                flat[static_cast<std::size_t>(k) * channels.size() + c];
        }
    }
    return {fs, std::move(samples), std::move(channels)};
}

void write_frf(const std::filesystem::path& dir, const FrfDataset& frf) {
    std::string meta;
    JsonWriter w(meta);
    w.begin_object();
    w.key("response_kind");
    w.value(to_string(frf.response_kind()));
    w.key("frequency_grid");
    w.begin_object();
    w.key("n_bins");
    w.value(static_cast<long long>(frf.n_bins()));
    w.key("f_min_hz");
    w.value(frf.frequencies_hz()[0]);
    w.key("f_max_hz");
    w.value(frf.frequencies_hz()[frf.n_bins() - 1]);
    w.end_object();
    w.key("outputs");
    w.begin_array();
    for (const auto& channel : frf.output_meta()) write_channel(w, channel);
    w.end_array();
    w.key("inputs");
    w.begin_array();
    for (const auto& channel : frf.input_meta()) write_channel(w, channel);
    w.end_array();
    w.end_object();
    meta += '\n';
    write_file(dir / "meta.json", meta);

    std::string csv;
    csv.reserve(static_cast<std::size_t>(frf.n_bins()) *
                static_cast<std::size_t>(frf.n_outputs() * frf.n_inputs()) * 64);
    csv += "f_hz,out_id,in_id,re,im\n";
    for (Eigen::Index k = 0; k < frf.n_bins(); ++k) {
        const std::string f = format_double(frf.frequencies_hz()[k]);
        for (Eigen::Index i = 0; i < frf.n_outputs(); ++i) {
            for (Eigen::Index j = 0; j < frf.n_inputs(); ++j) {
                const auto h = frf.value(i, j, k);
                csv += f;
                csv += ',';
                csv += frf.output_meta()[static_cast<std::size_t>(i)].id;
                csv += ',';
                csv += frf.input_meta()[static_cast<std::size_t>(j)].id;
                csv += ',';
                csv += format_double(h.real());
                csv += ',';
                csv += format_double(h.imag());
                csv += '\n';
            }
        }
    }
    write_file(dir / "frf.csv", csv);
}

FrfDataset read_frf(const std::filesystem::path& dir) {
    const json meta = load_json(dir / "meta.json");
    const ResponseKind kind =
        response_kind_from_string(meta.at("response_kind").get<std::string>());
    std::vector<ChannelMeta> outputs, inputs;
    for (const auto& j : meta.at("outputs")) outputs.push_back(parse_channel(j));
    for (const auto& j : meta.at("inputs")) inputs.push_back(parse_channel(j));
    const Eigen::Index p = static_cast<Eigen::Index>(outputs.size());
    const Eigen::Index m = static_cast<Eigen::Index>(inputs.size());
    const Eigen::Index n_bins = meta.at("frequency_grid").at("n_bins").get<Eigen::Index>();

    const std::filesystem::path csv_path = dir / "frf.csv";
    const std::string csv = read_file(csv_path);
    std::istringstream lines(csv);
    std::string line;
    if (!std::getline(lines, line) || line != "f_hz,out_id,in_id,re,im") {
        throw std::runtime_error("io: bad FRF header in " + csv_path.string());
    }

    Eigen::VectorXd frequencies(n_bins);
    Eigen::MatrixXcd values(p * m, n_bins);
    Eigen::Index row = 0;
    const Eigen::Index rows_expected = n_bins * p * m;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (row >= rows_expected) {
            throw std::runtime_error("io: surplus rows in " + csv_path.string());
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw std::runtime_error("io: ragged row in " + csv_path.string());
        }
        const Eigen::Index k = row / (p * m);
        const Eigen::Index i = (row / m) % p;
        const Eigen::Index j = row % m;
        const double f = parse_double(fields[0], csv_path);
        if (i == 0 && j == 0) {
            frequencies[k] = f;
        } else if (frequencies[k] != f) {
            throw std::runtime_error("io: frequency grouping broken in " + csv_path.string());
        }
        if (fields[1] != outputs[static_cast<std::size_t>(i)].id ||
            fields[2] != inputs[static_cast<std::size_t>(j)].id) {
            throw std::runtime_error("io: row order must be ascending f, then output, "
                                     "then input in " + csv_path.string());
        }
        values(j * p + i, k) = {parse_double(fields[3], csv_path),
                                parse_double(fields[4], csv_path)};
        ++row;
    }
    if (row != rows_expected) {
        throw std::runtime_error("io: missing rows in " + csv_path.string());
    }
    return {std::move(frequencies), std::move(values), std::move(outputs),
            std::move(inputs), kind};
}

std::vector<std::string> read_frf_output_ids(const std::filesystem::path& dir) {
    const json meta = load_json(dir / "meta.json");
    std::vector<std::string> ids;
    for (const auto& j : meta.at("outputs")) ids.push_back(j.at("id").get<std::string>());
    return ids;
}

std::string modal_set_to_json(const ModalSet& set) {
    std::string out;
    JsonWriter w(out);
    w.begin_object();
    w.key("order");
    w.value(static_cast<long long>(set.order));
    w.key("seed");
    w.value(set.seed);
    w.key("band");
    w.begin_array();
    w.value(set.band_hz[0]);
    w.value(set.band_hz[1]);
    w.end_array();
    w.key("modes");
    w.begin_array();
    for (const Mode& mode : set.modes) {
        w.begin_object();
        w.key("f_hz");
        w.value(mode.omega_hz);
        w.key("zeta");
        w.value(mode.zeta);
        w.key("phi_re");
        w.begin_array();
        for (Eigen::Index i = 0; i < mode.phi.size(); ++i) w.value(mode.phi[i].real());
        w.end_array();
        w.key("phi_im");
        w.begin_array();
        for (Eigen::Index i = 0; i < mode.phi.size(); ++i) w.value(mode.phi[i].imag());
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    out += '\n';
    return out;
}

void write_modal_set(const std::filesystem::path& file, const ModalSet& set) {
    write_file(file, modal_set_to_json(set));
}

ModalSet read_modal_set(const std::filesystem::path& file) {
    const json j = load_json(file);
    ModalSet set;
    set.order = j.at("order").get<Eigen::Index>();
    set.seed = j.at("seed").get<std::uint64_t>();
    set.band_hz = {j.at("band").at(0).get<double>(), j.at("band").at(1).get<double>()};
    for (const auto& mj : j.at("modes")) {
        const double f_hz = mj.at("f_hz").get<double>();
        const double zeta = mj.at("zeta").get<double>();
        const auto& re = mj.at("phi_re");
        const auto& im = mj.at("phi_im");
        if (re.size() != im.size() || re.empty()) {
            throw std::runtime_error("io: malformed mode shape in " + file.string());
        }
        Eigen::VectorXcd phi(static_cast<Eigen::Index>(re.size()));
        for (std::size_t i = 0; i < re.size(); ++i) {
            phi[static_cast<Eigen::Index>(i)] = {re.at(i).get<double>(),
                                                 im.at(i).get<double>()};
        }
        const double magnitude = 2.0 * std::numbers::pi * f_hz;
        Mode mode;
        mode.pole = {-zeta * magnitude, magnitude * std::sqrt(1.0 - zeta * zeta)};
        mode.omega_hz = f_hz;
        mode.zeta = zeta;
        mode.phi = std::move(phi);
        set.modes.push_back(std::move(mode));
    }
    return set;
}

void write_diagram_csv(const std::filesystem::path& file,
                       const StabilizationDiagram& diagram) {
    std::string csv = "order,f_hz,zeta,flag\n";
    for (const auto& entry : diagram.entries) {
        for (std::size_t i = 0; i < entry.modes.size(); ++i) {
            csv += std::to_string(entry.order);
            csv += ',';
            csv += format_double(entry.modes.modes[i].omega_hz);
            csv += ',';
            csv += format_double(entry.modes.modes[i].zeta);
            csv += ',';
            csv += to_string(entry.flags[i]);
            csv += '\n';
        }
    }
    write_file(file, csv);
}

void write_diagram_json(const std::filesystem::path& file,
                        const StabilizationDiagram& diagram) {
    std::string out;
    JsonWriter w(out);
    w.begin_object();
    w.key("tolerances");
    w.begin_object();
    w.key("df_rel");
    w.value(diagram.tolerances.df_rel);
    w.key("dzeta_rel");
    w.value(diagram.tolerances.dzeta_rel);
    w.key("mac_min");
    w.value(diagram.tolerances.mac_min);
    w.end_object();
    w.key("entries");
    w.begin_array();
    for (const auto& entry : diagram.entries) {
        w.begin_object();
        w.key("order");
        w.value(entry.order);
        w.key("note");
        w.value(entry.note);
        w.key("modes");
        w.begin_array();
        for (std::size_t i = 0; i < entry.modes.size(); ++i) {
            w.begin_object();
            w.key("f_hz");
            w.value(entry.modes.modes[i].omega_hz);
            w.key("zeta");
            w.value(entry.modes.modes[i].zeta);
            w.key("flag");
            w.value(to_string(entry.flags[i]));
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    out += '\n';
    write_file(file, out);
}

void write_damage_report(const std::filesystem::path& file, const DamageReport& report) {
    std::string out;
    JsonWriter w(out);
    w.begin_object();
    w.key("case_id");
    w.value(report.case_id);
    w.key("mtmac");
    w.value(report.mtmac);
    w.key("n_pairs");
    w.value(report.n_pairs());
    w.key("n_unpaired_baseline");
    w.value(report.n_unpaired_baseline);
    w.key("n_unpaired_candidate");
    w.value(report.n_unpaired_candidate);
    w.key("note");
    w.value(report.note);
    w.key("pairs");
    w.begin_array();
    for (int i = 0; i < report.n_pairs(); ++i) {
        w.begin_object();
        w.key("baseline_f_hz");
        w.value(report.baseline_f_hz[static_cast<std::size_t>(i)]);
        w.key("candidate_f_hz");
        w.value(report.candidate_f_hz[static_cast<std::size_t>(i)]);
        w.key("mac");
        w.value(report.mac_diag[static_cast<std::size_t>(i)]);
        w.key("delta_omega_pct");
        w.value(report.delta_omega_pct[static_cast<std::size_t>(i)]);
        w.end_object();
    }
    w.end_array();
    w.key("dof_labels");
    w.begin_array();
    for (const auto& label : report.dof_labels) w.value(label);
    w.end_array();
    w.key("comac");
    w.begin_array();
    for (Eigen::Index d = 0; d < report.comac.size(); ++d) w.value(report.comac[d]);
    w.end_array();
    w.key("scaled_comac");
    w.begin_array();
    for (Eigen::Index d = 0; d < report.scaled_comac.size(); ++d) {
        w.value(report.scaled_comac[d]);
    }
    w.end_array();
    w.end_object();
    out += '\n';
    write_file(file, out);
}

void write_combined_csv(const std::filesystem::path& file,
                        const std::vector<DamageReport>& reports) {
    std::string csv = "case_id,mtmac,n_pairs,min_comac_dof,min_comac\n";
    for (const auto& report : reports) {
        const Eigen::Index at = report.min_comac_dof();
        const std::string label =
            report.dof_labels.empty() ? "dof" + std::to_string(at)
                                      : report.dof_labels[static_cast<std::size_t>(at)];
        csv += report.case_id;
        csv += ',';
        csv += format_double(report.mtmac);
        csv += ',';
        csv += std::to_string(report.n_pairs());
        csv += ',';
        csv += label;
        csv += ',';
        csv += format_double(report.comac[at]);
        csv += '\n';
    }
    write_file(file, csv);
}

void write_scenario(const std::filesystem::path& file, const DamageScenario& scenario) {
    std::string out;
    JsonWriter w(out);
    w.begin_object();
    w.key("stiffness_factors");
    w.begin_array();
    for (double factor : scenario.stiffness_factors) w.value(factor);
    w.end_array();
    w.key("lumped_masses");
    w.begin_array();
    for (const auto& mass : scenario.lumped_masses) {
        w.begin_object();
        w.key("node");
        w.value(mass.node);
        w.key("kg");
        w.value(mass.kg);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    out += '\n';
    write_file(file, out);
}

DamageScenario read_scenario(const std::filesystem::path& file) {
    const json j = load_json(file);
    DamageScenario scenario;
    for (const auto& factor : j.at("stiffness_factors")) {
        scenario.stiffness_factors.push_back(factor.get<double>());
    }
    if (j.contains("lumped_masses")) {
        for (const auto& mj : j.at("lumped_masses")) {
            scenario.lumped_masses.push_back(
                {mj.at("node").get<int>(), mj.at("kg").get<double>()});
        }
    }
    return scenario;
}

void write_beam_config(const std::filesystem::path& file, const BeamConfig& config) {
    std::string out;
    JsonWriter w(out);
    w.begin_object();
    w.key("length_m");
    w.value(config.length_m);
    w.key("youngs_modulus_pa");
    w.value(config.youngs_modulus_pa);
    w.key("density_kgm3");
    w.value(config.density_kgm3);
    w.key("n_elements");
    w.value(config.n_elements);
    w.key("modal_damping");
    w.value(config.modal_damping);
    w.key("section");
    w.begin_object();
    w.key("area_m2");
    w.value(config.section.area_m2);
    w.key("iy_m4");
    w.value(config.section.iy_m4);
    w.key("iz_m4");
    w.value(config.section.iz_m4);
    w.end_object();
    w.end_object();
    out += '\n';
    write_file(file, out);
}

BeamConfig read_beam_config(const std::filesystem::path& file) {
    const json j = load_json(file);
    BeamConfig config;
    config.length_m = j.value("length_m", config.length_m);
    config.youngs_modulus_pa = j.value("youngs_modulus_pa", config.youngs_modulus_pa);
    config.density_kgm3 = j.value("density_kgm3", config.density_kgm3);
    config.n_elements = j.value("n_elements", config.n_elements);
    config.modal_damping = j.value("modal_damping", config.modal_damping);
    if (j.contains("section")) {
        const auto& s = j.at("section");
        config.section.area_m2 = s.at("area_m2").get<double>();
        config.section.iy_m4 = s.at("iy_m4").get<double>();
        config.section.iz_m4 = s.at("iz_m4").get<double>();
    } else {
        config.section = default_beam_config().section;
    }
    return config;
}

}  // namespace modalshm::io
