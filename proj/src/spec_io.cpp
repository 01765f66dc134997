#include "mazecap/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mazecap {

namespace {

using Json = nlohmann::ordered_json;

Json segment_to_json(const ArcSegment& s) {
    Json j;
    if (s.is_arc()) {
        j["kind"] = "arc";
        j["center"] = {s.center.x, s.center.y};
        j["radius"] = s.radius;
        j["angle_start"] = s.angle_start;
        j["angle_end"] = s.angle_end;
        j["orientation"] = s.ccw() ? "ccw" : "cw";
    } else {
        j["kind"] = "segment";
        j["p0"] = {s.p0.x, s.p0.y};
        j["p1"] = {s.p1.x, s.p1.y};
    }
    return j;
}

ArcSegment segment_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "arc") {
        const auto& c = j.at("center");
        return ArcSegment::arc({c.at(0).get<double>(), c.at(1).get<double>()},
                               j.at("radius").get<double>(), j.at("angle_start").get<double>(),
                               j.at("angle_end").get<double>());
    }
    if (kind == "segment") {
        const auto& a = j.at("p0");
        const auto& b = j.at("p1");
        return ArcSegment::segment({a.at(0).get<double>(), a.at(1).get<double>()},
                                   {b.at(0).get<double>(), b.at(1).get<double>()});
    }
    throw std::invalid_argument("unknown segment kind: " + kind);
}

Json chain_to_json(const Chain& c) {
    Json j;
    j["closed"] = c.closed;
    j["segments"] = Json::array();
    for (const auto& s : c.segments) j["segments"].push_back(segment_to_json(s));
    return j;
}

Chain chain_from_json(const Json& j) {
    Chain c;
    c.closed = j.at("closed").get<bool>();
    for (const auto& js : j.at("segments")) c.segments.push_back(segment_from_json(js));
    return c;
}

} // namespace

std::string spec_to_json(const CondenserSpec& spec) {
    Json j;
    j["version"] = 1;
    j["family"] = family_name(spec.family);
    if (spec.family == Family::Custom && !spec.custom_name.empty())
        j["name"] = spec.custom_name;
    Json params = Json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    j["params"] = params;
    j["outer"] = Json::array();
    for (const auto& loop : spec.outer_loops) j["outer"].push_back(chain_to_json(loop));
    for (const auto& wall : spec.walls) j["outer"].push_back(chain_to_json(wall));
    if (spec.compact.kind == CompactSet::Kind::Curve) {
        j["compact"] = Json{{"curve", chain_to_json(spec.compact.curve)}};
    } else {
        Json loops = Json::array();
        for (const auto& loop : spec.compact.region) loops.push_back(chain_to_json(loop));
        j["compact"] = Json{{"region", loops}};
    }
    return j.dump(2) + "\n";
}

CondenserSpec spec_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    const int version = j.at("version").get<int>();
    if (version != 1) throw std::invalid_argument("unsupported spec version");
    CondenserSpec spec;
    spec.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("name")) spec.custom_name = j.at("name").get<std::string>();
    for (const auto& [k, v] : j.at("params").items())
        spec.params.emplace_back(k, v.get<double>());
    for (const auto& jc : j.at("outer")) {
        Chain c = chain_from_json(jc);
        (c.closed ? spec.outer_loops : spec.walls).push_back(std::move(c));
    }
    const auto& jk = j.at("compact");
    if (jk.contains("curve")) {
        spec.compact.kind = CompactSet::Kind::Curve;
        spec.compact.curve = chain_from_json(jk.at("curve"));
    } else {
        spec.compact.kind = CompactSet::Kind::Region;
        for (const auto& jc : jk.at("region"))
            spec.compact.region.push_back(chain_from_json(jc));
    }
    return spec;
}

void save_spec(const CondenserSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << spec_to_json(spec);
}

CondenserSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
}

} // namespace mazecap
