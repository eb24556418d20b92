#ifndef INRLAB_MODEL_IO_HPP
#define INRLAB_MODEL_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "inrlab/csv.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/model.hpp"

namespace inrlab {

namespace detail {

inline std::string mapping_variant_name(MappingVariant v) {
    switch (v) {
    case MappingVariant::FourierRandom: return "fourier-random";
    case MappingVariant::FourierDeterministic: return "fourier-deterministic";
    case MappingVariant::SingleFrequency: return "single-frequency";
    case MappingVariant::SirenFirst: return "siren-first";
    case MappingVariant::Explicit: return "explicit";
    }
    return "?";
}

inline MappingVariant mapping_variant_from(const std::string& s) {
    if (s == "fourier-random") return MappingVariant::FourierRandom;
    if (s == "fourier-deterministic") return MappingVariant::FourierDeterministic;
    if (s == "single-frequency") return MappingVariant::SingleFrequency;
    if (s == "siren-first") return MappingVariant::SirenFirst;
    if (s == "explicit") return MappingVariant::Explicit;
    throw ParseError("model file: unknown mapping variant '" + s + "'");
}

inline std::string activation_name(Activation a) {
    switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Sine: return "sine";
    case Activation::Polynomial: return "polynomial";
    case Activation::Identity: return "identity";
    }
    return "?";
}

inline Activation activation_from(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "sine") return Activation::Sine;
    if (s == "polynomial") return Activation::Polynomial;
    if (s == "identity") return Activation::Identity;
    throw ParseError("model file: unknown activation '" + s + "'");
}

inline void append_array(std::string& out, const std::vector<double>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    out += ']';
}

} // namespace detail

// UTF-8 key-value model document. Doubles are written with 17 significant
// digits so that load(save(m)) restores theta bit for bit. Field names are
// the save format contract (see README).
inline void save_model(const InrModel& m, const std::string& path) {
    for (double v : m.theta)
        if (!std::isfinite(v)) throw ArgumentError("save_model: theta must be finite");

    std::string s;
    s.reserve(64 + 26 * (m.theta.size() + m.frozen_mapping.size()));
    s += "{\n\"format_version\": 1,\n";
    s += "\"mapping\": {";
    s += "\"variant\": \"" + detail::mapping_variant_name(m.mapping.variant) + "\"";
    s += ", \"input_dim\": " + std::to_string(m.mapping.input_dim);
    s += ", \"trainable\": " + std::string(m.mapping.trainable ? "true" : "false");
    switch (m.mapping.variant) {
    case MappingVariant::FourierRandom:
        s += ", \"sigma\": " + format_double(m.mapping.sigma);
        s += ", \"rows\": " + std::to_string(m.mapping.rows);
        break;
    case MappingVariant::FourierDeterministic:
        s += ", \"levels\": " + std::to_string(m.mapping.levels);
        break;
    case MappingVariant::SingleFrequency:
        s += ", \"f0\": " + format_double(m.mapping.f0);
        break;
    case MappingVariant::SirenFirst:
        s += ", \"omega0\": " + format_double(m.mapping.omega0);
        s += ", \"width\": " + std::to_string(m.mapping.width);
        break;
    case MappingVariant::Explicit: {
        s += ", \"omega_rows\": " + std::to_string(m.mapping.omega.rows);
        s += ", \"omega\": ";
        detail::append_array(s, m.mapping.omega.data);
        s += ", \"phase\": ";
        detail::append_array(s, m.mapping.phase);
        break;
    }
    }
    s += "},\n\"layers\": [";
    for (std::size_t i = 0; i < m.hidden.size(); ++i) {
        const auto& l = m.hidden[i];
        if (i) s += ", ";
        s += "{\"width\": " + std::to_string(l.width);
        s += ", \"activation\": \"" + detail::activation_name(l.activation) + "\"";
        if (l.activation == Activation::Sine) s += ", \"omega0\": " + format_double(l.omega0);
        if (l.activation == Activation::Polynomial) {
            s += ", \"poly\": ";
            detail::append_array(s, l.poly);
        }
        s += "}";
    }
    s += "],\n";
    s += "\"parameter_count\": " + std::to_string(m.theta.size()) + ",\n";
    if (!m.mapping.trainable) {
        s += "\"frozen_mapping\": ";
        detail::append_array(s, m.frozen_mapping);
        s += ",\n";
    }
    s += "\"theta\": ";
    detail::append_array(s, m.theta);
    s += "\n}\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_model: cannot open " + path);
    out << s;
    if (!out) throw IoError("save_model: write failed for " + path);
}

inline InrModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_model: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }

    try {
        if (doc.at("format_version").get<int>() != 1)
            throw ParseError("model file: unsupported format_version");

        const auto& jm = doc.at("mapping");
        MappingSpec spec;
        spec.variant = detail::mapping_variant_from(jm.at("variant").get<std::string>());
        spec.input_dim = jm.at("input_dim").get<std::size_t>();
        spec.trainable = jm.at("trainable").get<bool>();
        switch (spec.variant) {
        case MappingVariant::FourierRandom:
            spec.sigma = jm.at("sigma").get<double>();
            spec.rows = jm.at("rows").get<std::size_t>();
            break;
        case MappingVariant::FourierDeterministic:
            spec.levels = jm.at("levels").get<std::size_t>();
            break;
        case MappingVariant::SingleFrequency:
            spec.f0 = jm.at("f0").get<double>();
            break;
        case MappingVariant::SirenFirst:
            spec.omega0 = jm.at("omega0").get<double>();
            spec.width = jm.at("width").get<std::size_t>();
            break;
        case MappingVariant::Explicit: {
            std::size_t rows = jm.at("omega_rows").get<std::size_t>();
            auto flat = jm.at("omega").get<std::vector<double>>();
            if (rows == 0 || flat.size() % rows != 0)
                throw ParseError("model file: omega shape is inconsistent");
            spec.omega = Matrix(rows, flat.size() / rows);
            spec.omega.data = std::move(flat);
            spec.phase = jm.at("phase").get<std::vector<double>>();
            break;
        }
        }

        std::vector<LayerSpec> hidden;
        for (const auto& jl : doc.at("layers")) {
            LayerSpec l;
            l.width = jl.at("width").get<std::size_t>();
            l.activation = detail::activation_from(jl.at("activation").get<std::string>());
            if (l.activation == Activation::Sine) l.omega0 = jl.at("omega0").get<double>();
            if (l.activation == Activation::Polynomial)
                l.poly = jl.at("poly").get<std::vector<double>>();
            hidden.push_back(std::move(l));
        }

        InrModel m;
        m.mapping = std::move(spec);
        m.hidden = std::move(hidden);
        m.mapping.validate();
        for (const auto& l : m.hidden) l.validate();
        m.layout = detail::make_layout(m.mapping, m.hidden);

        m.theta = doc.at("theta").get<std::vector<double>>();
        const std::size_t declared = doc.at("parameter_count").get<std::size_t>();
        if (declared != m.theta.size())
            throw ParseError("model file: parameter_count " + std::to_string(declared) +
                             " does not match theta length " + std::to_string(m.theta.size()));
        if (m.theta.size() != m.layout.total)
            throw ParseError("model file: theta length " + std::to_string(m.theta.size()) +
                             " does not match the architecture (" +
                             std::to_string(m.layout.total) + " expected)");
        if (!m.mapping.trainable) {
            m.frozen_mapping = doc.at("frozen_mapping").get<std::vector<double>>();
            if (m.frozen_mapping.size() != m.mapping.storage_count())
                throw ParseError("model file: frozen_mapping length mismatch");
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

} // namespace inrlab

#endif
