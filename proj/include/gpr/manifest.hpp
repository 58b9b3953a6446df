#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "gpr/attributes.hpp"
#include "gpr/errors.hpp"
#include "gpr/rng.hpp"

namespace gpr {

// One annotated image. Attribute values are stored as indices into the
// schema; camera_id is the background number (backgrounds stand in for
// fixed camera sites, giving eval its cross-camera semantics).
struct ImageRecord {
    std::int32_t identity_id = 0;
    std::uint8_t background = 0;
    std::uint8_t weather = 0;
    std::uint8_t illumination = 0;
    std::uint8_t viewpoint = 0;
    std::uint8_t camera_id = 0;
    std::uint64_t render_seed = 0;

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct GeneratorConfig {
    int num_identities = 1;
    // Selected values per dimension; defaults cover the full schema.
    std::vector<std::string> backgrounds = default_schema().backgrounds;
    std::vector<std::string> weathers = default_schema().weathers;
    std::vector<std::string> illumination_bands = default_schema().illumination_bands;
    std::vector<int> viewpoints = default_schema().viewpoints;
    int image_width = 32;
    int image_height = 64;
    std::uint64_t master_seed = 0;
};

struct DatasetManifest {
    AttributeSchema schema;
    std::vector<ImageRecord> records;
    GeneratorConfig generator_config;

    std::size_t size() const { return records.size(); }

    std::vector<std::int32_t> identities_in_order() const {
        std::vector<std::int32_t> ids;
        std::unordered_set<std::int32_t> seen;
        for (const auto& r : records)
            if (seen.insert(r.identity_id).second) ids.push_back(r.identity_id);
        return ids;
    }
};

// Optional per-dimension value filters; a missing filter keeps the whole
// dimension, an explicitly empty one is an error.
struct SliceFilter {
    std::optional<std::vector<std::string>> backgrounds;
    std::optional<std::vector<std::string>> weathers;
    std::optional<std::vector<std::string>> illumination_bands;
    std::optional<std::vector<int>> viewpoints;
};

namespace detail {

// Hash of the attribute tuple alone. The environment layers of the renderer
// (background texture, weather overlay) are seeded from this, so records
// that differ only in identity share their environment pixels exactly.
inline std::uint64_t attribute_token(int bg, int weather, int illumination, int viewpoint) {
    std::uint64_t t = seed_mix(0x6772702d656e76ULL, static_cast<std::uint64_t>(bg));
    t = seed_mix(t, static_cast<std::uint64_t>(weather));
    t = seed_mix(t, static_cast<std::uint64_t>(illumination));
    t = seed_mix(t, static_cast<std::uint64_t>(viewpoint));
    return t;
}

inline std::uint64_t identity_token(std::uint64_t master_seed, std::int32_t identity) {
    return seed_mix(seed_mix(0x6772702d696470ULL, master_seed),
                    static_cast<std::uint64_t>(identity));
}

// render_seed = identity_token ^ attribute_token. Pure in (master_seed, key),
// and the renderer can recover the per-identity token from a record alone.
inline std::uint64_t record_render_seed(std::uint64_t master_seed, std::int32_t identity,
                                        int bg, int weather, int illumination, int viewpoint) {
    return identity_token(master_seed, identity) ^
           attribute_token(bg, weather, illumination, viewpoint);
}

// Selected labels -> schema indices, deduplicated and in schema order.
template <typename Value, typename IndexFn>
std::vector<int> canonical_indices(const std::vector<Value>& selected, std::size_t cardinality,
                                   const char* dim, IndexFn index_of) {
    if (selected.empty())
        raise(ErrorKind::empty_attribute_set, std::string("no values selected for ") + dim);
    std::vector<bool> chosen(cardinality, false);
    for (const auto& v : selected) {
        int i = index_of(v);
        if (i < 0) {
            std::ostringstream os;
            os << "unknown " << dim << " value: " << v;
            raise(ErrorKind::bad_label, os.str());
        }
        chosen[static_cast<std::size_t>(i)] = true;
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < cardinality; ++i)
        if (chosen[i]) out.push_back(static_cast<int>(i));
    return out;
}

inline std::uint64_t record_key(const ImageRecord& r) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r.identity_id)) << 20) |
           (static_cast<std::uint64_t>(r.background) << 16) |
           (static_cast<std::uint64_t>(r.weather) << 12) |
           (static_cast<std::uint64_t>(r.illumination) << 8) |
           static_cast<std::uint64_t>(r.viewpoint);
}

} // namespace detail

// Full factorial manifest over the selected attribute values, identity-major
// and in schema order within each dimension, so equal configs produce
// byte-identical manifests.
inline DatasetManifest generate_manifest(const GeneratorConfig& config) {
    if (config.num_identities < 1)
        raise(ErrorKind::bad_config, "num_identities must be >= 1");
    if (config.image_width < 16 || config.image_height < 16)
        raise(ErrorKind::bad_config, "image size must be at least 16x16");

    DatasetManifest manifest;
    manifest.schema = default_schema();
    manifest.generator_config = config;
    const AttributeSchema& s = manifest.schema;

    auto bgs = detail::canonical_indices(config.backgrounds, s.backgrounds.size(), "background",
                                         [&](const std::string& v) { return s.background_index(v); });
    auto wts = detail::canonical_indices(config.weathers, s.weathers.size(), "weather",
                                         [&](const std::string& v) { return s.weather_index(v); });
    auto ils = detail::canonical_indices(config.illumination_bands, s.illumination_bands.size(),
                                         "illumination",
                                         [&](const std::string& v) { return s.illumination_index(v); });
    auto vps = detail::canonical_indices(config.viewpoints, s.viewpoints.size(), "viewpoint",
                                         [&](int v) { return s.viewpoint_index(v); });

    manifest.records.reserve(static_cast<std::size_t>(config.num_identities) * bgs.size() *
                             wts.size() * ils.size() * vps.size());
    for (std::int32_t id = 0; id < config.num_identities; ++id)
        for (int b : bgs)
            for (int w : wts)
                for (int i : ils)
                    for (int v : vps) {
                        ImageRecord r;
                        r.identity_id = id;
                        r.background = static_cast<std::uint8_t>(b);
                        r.weather = static_cast<std::uint8_t>(w);
                        r.illumination = static_cast<std::uint8_t>(i);
                        r.viewpoint = static_cast<std::uint8_t>(v);
                        r.camera_id = static_cast<std::uint8_t>(b + 1);
                        r.render_seed =
                            detail::record_render_seed(config.master_seed, id, b, w, i, v);
                        manifest.records.push_back(r);
                    }
    return manifest;
}

inline DatasetManifest slice_manifest(const DatasetManifest& manifest, const SliceFilter& filter,
                                      std::optional<int> id_limit = std::nullopt) {
    const AttributeSchema& s = manifest.schema;

    auto mask_for = [&](const auto& selected, std::size_t cardinality, const char* dim,
                        auto index_of) -> std::vector<bool> {
        if (!selected.has_value()) return std::vector<bool>(cardinality, true);
        auto idx = detail::canonical_indices(*selected, cardinality, dim, index_of);
        std::vector<bool> mask(cardinality, false);
        for (int i : idx) mask[static_cast<std::size_t>(i)] = true;
        return mask;
    };

    auto bg_mask = mask_for(filter.backgrounds, s.backgrounds.size(), "background",
                            [&](const std::string& v) { return s.background_index(v); });
    auto wt_mask = mask_for(filter.weathers, s.weathers.size(), "weather",
                            [&](const std::string& v) { return s.weather_index(v); });
    auto il_mask = mask_for(filter.illumination_bands, s.illumination_bands.size(), "illumination",
                            [&](const std::string& v) { return s.illumination_index(v); });
    auto vp_mask = mask_for(filter.viewpoints, s.viewpoints.size(), "viewpoint",
                            [&](int v) { return s.viewpoint_index(v); });

    std::optional<std::unordered_set<std::int32_t>> kept_ids;
    if (id_limit.has_value()) {
        auto ids = manifest.identities_in_order();
        if (*id_limit < 0 || static_cast<std::size_t>(*id_limit) > ids.size())
            raise(ErrorKind::bad_config, "id_limit exceeds identity count");
        kept_ids.emplace(ids.begin(), ids.begin() + *id_limit);
    }

    DatasetManifest out;
    out.schema = manifest.schema;
    out.generator_config = manifest.generator_config;
    for (const auto& r : manifest.records) {
        if (!bg_mask[r.background] || !wt_mask[r.weather] || !il_mask[r.illumination] ||
            !vp_mask[r.viewpoint])
            continue;
        if (kept_ids && !kept_ids->count(r.identity_id)) continue;
        out.records.push_back(r);
    }
    return out;
}

// Keeps at most max_per_identity records per identity (a deterministic
// seeded pick), preserving record order. Used to bound training cost.
inline DatasetManifest limit_records_per_identity(const DatasetManifest& manifest,
                                                  int max_per_identity, std::uint64_t seed) {
    if (max_per_identity < 1) raise(ErrorKind::bad_config, "max_per_identity must be >= 1");
    std::unordered_map<std::int32_t, std::vector<std::size_t>> by_id;
    std::vector<std::int32_t> id_order;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        auto id = manifest.records[i].identity_id;
        if (!by_id.count(id)) id_order.push_back(id);
        by_id[id].push_back(i);
    }
    std::vector<bool> keep(manifest.records.size(), false);
    for (auto id : id_order) {
        auto& idx = by_id[id];
        Rng rng(seed_mix(seed, static_cast<std::uint64_t>(id)));
        std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(max_per_identity), idx.size());
        for (std::size_t k = 0; k < take; ++k) {
            std::size_t j = k + static_cast<std::size_t>(rng.next_below(idx.size() - k));
            std::swap(idx[k], idx[j]);
            keep[idx[k]] = true;
        }
    }
    DatasetManifest out;
    out.schema = manifest.schema;
    out.generator_config = manifest.generator_config;
    for (std::size_t i = 0; i < manifest.records.size(); ++i)
        if (keep[i]) out.records.push_back(manifest.records[i]);
    return out;
}

inline std::string serialize_manifest(const DatasetManifest& manifest) {
    const AttributeSchema& s = manifest.schema;
    std::string out = "gpr-manifest v1\n";
    for (const auto& r : manifest.records) {
        out += std::to_string(r.identity_id);
        out += ',';
        out += s.backgrounds[r.background];
        out += ',';
        out += s.weathers[r.weather];
        out += ',';
        out += s.illumination_bands[r.illumination];
        out += ',';
        out += std::to_string(s.viewpoints[r.viewpoint]);
        out += ',';
        out += std::to_string(static_cast<int>(r.camera_id));
        out += ',';
        out += std::to_string(r.render_seed);
        out += '\n';
    }
    return out;
}

inline void persist_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io_error, "cannot open for writing: " + path);
    std::string text = serialize_manifest(manifest);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) raise(ErrorKind::io_error, "write failed: " + path);
}

inline DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::io_error, "cannot open for reading: " + path);

    auto fail = [&](int line, const std::string& what) {
        std::ostringstream os;
        os << path << ": line " << line << ": " << what;
        raise(ErrorKind::format_error, os.str());
    };

    std::string line;
    if (!std::getline(in, line)) fail(1, "missing header");
    if (line == "gpr-manifest v1\r") line.pop_back();
    if (line != "gpr-manifest v1") fail(1, "missing header 'gpr-manifest v1'");

    DatasetManifest manifest;
    manifest.schema = default_schema();
    const AttributeSchema& s = manifest.schema;

    std::unordered_set<std::uint64_t> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() != 7) fail(line_no, "expected 7 fields, got " + std::to_string(fields.size()));

        auto parse_int = [&](const std::string& text, const char* field) -> long long {
            try {
                std::size_t pos = 0;
                long long v = std::stoll(text, &pos);
                if (pos != text.size()) throw std::invalid_argument(field);
                return v;
            } catch (const std::exception&) {
                fail(line_no, std::string("field '") + field + "' is not an integer: " + text);
                return 0;
            }
        };
        auto parse_u64 = [&](const std::string& text, const char* field) -> std::uint64_t {
            try {
                std::size_t pos = 0;
                unsigned long long v = std::stoull(text, &pos);
                if (pos != text.size()) throw std::invalid_argument(field);
                return v;
            } catch (const std::exception&) {
                fail(line_no, std::string("field '") + field + "' is not an unsigned integer: " + text);
                return 0;
            }
        };

        ImageRecord r;
        long long id = parse_int(fields[0], "identity");
        if (id < 0) fail(line_no, "field 'identity' must be >= 0");
        r.identity_id = static_cast<std::int32_t>(id);

        int bg = s.background_index(fields[1]);
        if (bg < 0) fail(line_no, "unknown background label: " + fields[1]);
        r.background = static_cast<std::uint8_t>(bg);

        int wt = s.weather_index(fields[2]);
        if (wt < 0) fail(line_no, "unknown weather label: " + fields[2]);
        r.weather = static_cast<std::uint8_t>(wt);

        int il = s.illumination_index(fields[3]);
        if (il < 0) fail(line_no, "unknown illumination label: " + fields[3]);
        r.illumination = static_cast<std::uint8_t>(il);

        int vp = s.viewpoint_index(static_cast<int>(parse_int(fields[4], "viewpoint")));
        if (vp < 0) fail(line_no, "unknown viewpoint value: " + fields[4]);
        r.viewpoint = static_cast<std::uint8_t>(vp);

        long long cam = parse_int(fields[5], "camera");
        if (cam != bg + 1) fail(line_no, "field 'camera' does not match background index");
        r.camera_id = static_cast<std::uint8_t>(cam);

        r.render_seed = parse_u64(fields[6], "render_seed");

        if (!seen.insert(detail::record_key(r)).second)
            fail(line_no, "duplicate record for identity " + fields[0]);
        manifest.records.push_back(r);
    }
    return manifest;
}

} // namespace gpr
