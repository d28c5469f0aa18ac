#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "teich/circle_map.hpp"
#include "teich/errors.hpp"
#include "teich/fuchsian.hpp"
#include "teich/marked.hpp"
#include "teich/mcg.hpp"
#include "teich/moebius.hpp"
#include "teich/pants.hpp"

namespace teich {

using json = nlohmann::json;

inline json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(errc::parse_error, "bad JSON in '" + path.string() + "': " + e.what());
    }
}

inline void save_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

inline json boundary_point_to_json(const BoundaryPoint& p) {
    if (p.is_infinity(1e-15)) return json{{"infinity", true}};
    return json{{"angle", p.angle()}};
}

inline BoundaryPoint boundary_point_from_json(const json& j) {
    if (j.contains("infinity") && j["infinity"].get<bool>()) return BoundaryPoint::infinity();
    if (j.contains("angle")) return BoundaryPoint::from_angle(j["angle"].get<double>());
    if (j.contains("real")) return BoundaryPoint::from_real(j["real"].get<double>());
    fail(errc::parse_error, "boundary point needs one of angle/real/infinity");
}

inline json representation_to_json(const GroupRepresentation& rep) {
    json j;
    j["generators"] = rep.generator_names;
    json mats = json::object();
    for (int g = 0; g < rep.rank(); ++g) {
        const Moebius& m = rep.images[g];
        mats[rep.generator_names[g]] = {m.a(), m.b(), m.c(), m.d()};
    }
    j["matrices"] = mats;
    if (!rep.relators.empty()) {
        json r = json::array();
        for (const Word& w : rep.relators) r.push_back(rep.format(w));
        j["relators"] = r;
    }
    if (!rep.peripheral_words.empty()) {
        json p = json::array();
        for (const Word& w : rep.peripheral_words) p.push_back(rep.format(w));
        j["peripheral"] = p;
    }
    if (!rep.twist_marks.empty()) {
        json marks = json::array();
        for (const auto& mk : rep.twist_marks) {
            json m;
            m["cuff"] = rep.format(mk.cuff);
            auto names = [&](const std::vector<int>& ids) {
                json a = json::array();
                for (int i : ids) a.push_back(rep.generator_names[i]);
                return a;
            };
            m["movers"] = names(mk.movers);
            m["left"] = names(mk.left_mult);
            m["right"] = names(mk.right_mult);
            marks.push_back(m);
        }
        j["twist_marks"] = marks;
    }
    return j;
}

inline GroupRepresentation representation_from_json(const json& j) {
    GroupRepresentation rep;
    if (!j.contains("generators") || !j.contains("matrices"))
        fail(errc::parse_error, "representation needs 'generators' and 'matrices'");
    rep.generator_names = j["generators"].get<std::vector<std::string>>();
    for (const std::string& name : rep.generator_names) {
        const json& mats = j["matrices"];
        if (!mats.contains(name))
            fail(errc::parse_error, "no matrix for generator '" + name + "'");
        auto e = mats[name].get<std::vector<double>>();
        if (e.size() != 4) fail(errc::parse_error, "matrix of '" + name + "' needs 4 entries");
        rep.images.emplace_back(e[0], e[1], e[2], e[3]);
    }
    if (j.contains("relators"))
        for (const auto& s : j["relators"]) rep.relators.push_back(rep.parse(s.get<std::string>()));
    if (j.contains("peripheral"))
        for (const auto& s : j["peripheral"])
            rep.peripheral_words.push_back(rep.parse(s.get<std::string>()));
    if (j.contains("twist_marks"))
        for (const auto& m : j["twist_marks"]) {
            GroupRepresentation::TwistMark mk;
            mk.cuff = rep.parse(m.at("cuff").get<std::string>());
            auto ids = [&](const json& a) {
                std::vector<int> out;
                for (const auto& s : a) out.push_back(rep.generator_index(s.get<std::string>()));
                return out;
            };
            if (m.contains("movers")) mk.movers = ids(m["movers"]);
            if (m.contains("left")) mk.left_mult = ids(m["left"]);
            if (m.contains("right")) mk.right_mult = ids(m["right"]);
            rep.twist_marks.push_back(mk);
        }
    validate_representation(rep);
    return rep;
}

inline GroupRepresentation load_representation(const std::filesystem::path& path) {
    return representation_from_json(load_json(path));
}

inline void save_representation(const std::filesystem::path& path,
                                const GroupRepresentation& rep) {
    save_json(path, representation_to_json(rep));
}

inline PantsDecomposition pants_from_json(const json& j) {
    PantsDecomposition pd;
    if (!j.contains("pants")) fail(errc::parse_error, "pants file needs a 'pants' list");
    for (const auto& pj : j["pants"]) {
        if (!pj.contains("cuffs") || pj["cuffs"].size() != 3)
            fail(errc::parse_error, "each pants needs exactly 3 cuffs");
        std::array<CuffSlot, 3> cuffs;
        for (int s = 0; s < 3; ++s) {
            const json& c = pj["cuffs"][s];
            if (c.contains("cusp") && c["cusp"].get<bool>()) cuffs[s] = CuffSlot::make_cusp();
            else if (c.contains("length")) cuffs[s] = CuffSlot::make_cuff(c["length"].get<double>());
            else fail(errc::parse_error, "cuff needs 'length' or 'cusp'");
        }
        pd.pants.push_back(cuffs);
    }
    if (j.contains("gluings"))
        for (const auto& gj : j["gluings"]) {
            Gluing g;
            auto from = gj.at("from").get<std::vector<int>>();
            auto to = gj.at("to").get<std::vector<int>>();
            if (from.size() != 2 || to.size() != 2)
                fail(errc::parse_error, "gluing endpoints are [pants, slot] pairs");
            g.from_pants = from[0];
            g.from_slot = from[1];
            g.to_pants = to[0];
            g.to_slot = to[1];
            g.twist = gj.value("twist", 0.0);
            pd.gluings.push_back(g);
        }
    return pd;
}

inline PantsDecomposition load_pants(const std::filesystem::path& path) {
    return pants_from_json(load_json(path));
}

// Mapping-class file: {"images": {"A": "B A"}, "inverse_images": {...}};
// generators missing from a map are fixed.
inline MappingClass mapping_class_from_json(const json& j, const GroupRepresentation& rep) {
    MappingClass mc;
    if (!j.contains("images") || !j.contains("inverse_images"))
        fail(errc::parse_error, "mapping class needs 'images' and 'inverse_images'");
    auto read = [&](const json& m) {
        std::vector<Word> words;
        for (int g = 0; g < rep.rank(); ++g) {
            const std::string& name = rep.generator_names[g];
            words.push_back(m.contains(name) ? rep.parse(m[name].get<std::string>())
                                             : Word::generator(g));
        }
        return words;
    };
    mc.images = read(j["images"]);
    mc.inverse_images = read(j["inverse_images"]);
    return mc;
}

inline MappingClass load_mapping_class(const std::filesystem::path& path,
                                       const GroupRepresentation& rep) {
    return mapping_class_from_json(load_json(path), rep);
}

// Marked-structure file: {"reference": "ref.json", "target": "target.json"},
// paths resolved relative to the file itself.
inline MarkedStructure load_marked(const std::filesystem::path& path) {
    json j = load_json(path);
    if (!j.contains("reference") || !j.contains("target"))
        fail(errc::parse_error, "marked structure needs 'reference' and 'target' paths");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path q(p);
        return q.is_absolute() ? q : path.parent_path() / q;
    };
    return make_marked(load_representation(resolve(j["reference"].get<std::string>())),
                       load_representation(resolve(j["target"].get<std::string>())));
}

// Manifest: {"structures": ["ms0.json", ...]} or a bare array of paths.
inline std::vector<std::filesystem::path> load_manifest(const std::filesystem::path& path) {
    json j = load_json(path);
    const json& list = j.is_array() ? j : (j.contains("structures") ? j["structures"] : j);
    if (!list.is_array()) fail(errc::parse_error, "manifest needs a list of structure paths");
    std::vector<std::filesystem::path> out;
    for (const auto& s : list) {
        std::filesystem::path q(s.get<std::string>());
        out.push_back(q.is_absolute() ? q : path.parent_path() / q);
    }
    if (out.size() < 2) fail(errc::parse_error, "manifest lists fewer than 2 structures");
    return out;
}

inline void write_bmap_csv(const std::filesystem::path& path, const SampledCircleMap& map,
                           const GroupRepresentation& rep) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write '" + path.string() + "'");
    out << "x_angle,y_angle,word\n" << std::setprecision(17);
    for (size_t i = 0; i < map.size(); ++i) {
        out << map.xs()[i] << ',' << map.ys()[i] << ",\"";
        if (map.label(i)) out << rep.format(*map.label(i));
        out << "\"\n";
    }
}

inline void write_converge_csv(const std::filesystem::path& path,
                               std::span<const ConvergenceRow> rows) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write '" + path.string() + "'");
    out << "i,char_dist,bmap_dist\n" << std::setprecision(17);
    for (const ConvergenceRow& r : rows)
        out << r.index << ',' << r.char_dist << ',' << r.bmap_dist << '\n';
}

// Two panels: the chord diagram x -> y on the unit circle, and the graph of
// the map in angle coordinates.
inline void write_bmap_svg(const std::filesystem::path& path, const SampledCircleMap& map) {
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write '" + path.string() + "'");
    const double R = 180.0, cx = 200.0, cy = 200.0;
    const double gx = 420.0, gy = 380.0, gs = 360.0;  // graph origin (lower-left) and size
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='800' height='400' "
           "viewBox='0 0 800 400'>\n";
    out << "<circle cx='" << cx << "' cy='" << cy << "' r='" << R
        << "' fill='none' stroke='black'/>\n";
    for (size_t i = 0; i < map.size(); ++i) {
        double x1 = cx + R * std::cos(map.xs()[i]), y1 = cy - R * std::sin(map.xs()[i]);
        double x2 = cx + R * std::cos(map.ys()[i]), y2 = cy - R * std::sin(map.ys()[i]);
        out << "<line x1='" << x1 << "' y1='" << y1 << "' x2='" << x2 << "' y2='" << y2
            << "' stroke='steelblue' stroke-width='0.4'/>\n";
    }
    out << "<rect x='" << gx << "' y='" << gy - gs << "' width='" << gs << "' height='" << gs
        << "' fill='none' stroke='black'/>\n";
    out << "<polyline fill='none' stroke='crimson' stroke-width='1' points='";
    for (size_t i = 0; i < map.size(); ++i) {
        double px = gx + gs * map.xs()[i] / two_pi;
        double py = gy - gs * map.ys()[i] / two_pi;
        out << px << ',' << py << ' ';
    }
    out << "'/>\n</svg>\n";
}

} // namespace teich
