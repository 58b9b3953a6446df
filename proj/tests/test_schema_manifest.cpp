#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gpr/manifest.hpp"

using namespace gpr;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

GeneratorConfig small_config() {
    GeneratorConfig cfg;
    cfg.num_identities = 2;
    cfg.backgrounds = {"#1", "#3"};
    cfg.weathers = {"clear", "rainy"};
    cfg.illumination_bands = {"09~12"};
    cfg.viewpoints = {0, 180};
    cfg.master_seed = 11;
    return cfg;
}

} // namespace

TEST_CASE("default schema has the documented cardinalities") {
    auto s = default_schema();
    CHECK(s.backgrounds.size() == 9);
    CHECK(s.weathers.size() == 7);
    CHECK(s.illumination_bands.size() == 8);
    CHECK(s.viewpoints.size() == 12);

    CHECK(std::find(s.weathers.begin(), s.weathers.end(), "blizzard") != s.weathers.end());
    CHECK(s.viewpoints.front() == 0);
    CHECK(s.viewpoints.back() == 330);
    for (int v : s.viewpoints) {
        CHECK(v % 30 == 0);
        CHECK(v >= 0);
        CHECK(v <= 330);
    }
    CHECK(s.backgrounds.front() == "#1");
    CHECK(s.backgrounds.back() == "#9");
    CHECK(s.illumination_bands.front() == "00~03");
    CHECK(s.illumination_bands.back() == "21~24");

    // 9 x 7 x 8 x 12 attribute combinations per identity
    CHECK(s.backgrounds.size() * s.weathers.size() * s.illumination_bands.size() *
              s.viewpoints.size() ==
          6048);
}

TEST_CASE("labels are unique within each dimension") {
    auto s = default_schema();
    auto unique_count = [](auto v) {
        std::sort(v.begin(), v.end());
        return std::unique(v.begin(), v.end()) - v.begin();
    };
    CHECK(unique_count(s.backgrounds) == 9);
    CHECK(unique_count(s.weathers) == 7);
    CHECK(unique_count(s.illumination_bands) == 8);
    CHECK(unique_count(s.viewpoints) == 12);
}

TEST_CASE("generate_manifest produces the full factorial") {
    SECTION("restricted config: 2 x 1 x 1 x 1 x 2") {
        GeneratorConfig cfg;
        cfg.num_identities = 2;
        cfg.backgrounds = {"#1"};
        cfg.weathers = {"clear"};
        cfg.illumination_bands = {"09~12"};
        cfg.viewpoints = {0, 180};
        CHECK(generate_manifest(cfg).records.size() == 4);
    }
    SECTION("full schema per identity") {
        GeneratorConfig cfg;
        cfg.num_identities = 3;
        CHECK(generate_manifest(cfg).records.size() == 3 * 6048);
    }
    SECTION("cardinality identity over random subset configs") {
        Rng rng(42);
        auto schema = default_schema();
        for (int trial = 0; trial < 20; ++trial) {
            GeneratorConfig cfg;
            cfg.num_identities = 1 + static_cast<int>(rng.next_below(4));
            auto pick = [&](const auto& all, auto& out) {
                out.clear();
                std::size_t n = 1 + rng.next_below(all.size());
                auto idx = all;
                for (std::size_t i = 0; i < n; ++i) {
                    std::size_t j = i + rng.next_below(idx.size() - i);
                    std::swap(idx[i], idx[j]);
                    out.push_back(idx[i]);
                }
            };
            pick(schema.backgrounds, cfg.backgrounds);
            pick(schema.weathers, cfg.weathers);
            pick(schema.illumination_bands, cfg.illumination_bands);
            pick(schema.viewpoints, cfg.viewpoints);
            auto m = generate_manifest(cfg);
            CHECK(m.records.size() == static_cast<std::size_t>(cfg.num_identities) *
                                          cfg.backgrounds.size() * cfg.weathers.size() *
                                          cfg.illumination_bands.size() * cfg.viewpoints.size());
        }
    }
}

TEST_CASE("generate_manifest is deterministic and identity-major") {
    auto cfg = small_config();
    auto a = generate_manifest(cfg);
    auto b = generate_manifest(cfg);
    CHECK(serialize_manifest(a) == serialize_manifest(b));

    // identity-major, then schema order within each dimension
    CHECK(a.records[0].identity_id == 0);
    CHECK(a.records.back().identity_id == 1);
    for (std::size_t i = 1; i < a.records.size(); ++i)
        CHECK(a.records[i - 1].identity_id <= a.records[i].identity_id);

    // selected values are canonicalized to schema order regardless of config order
    auto cfg_rev = cfg;
    std::reverse(cfg_rev.backgrounds.begin(), cfg_rev.backgrounds.end());
    std::reverse(cfg_rev.viewpoints.begin(), cfg_rev.viewpoints.end());
    CHECK(serialize_manifest(generate_manifest(cfg_rev)) == serialize_manifest(a));
}

TEST_CASE("render_seed is a pure function of master seed and record key") {
    auto cfg = small_config();
    auto full = generate_manifest(cfg);

    auto cfg_sub = cfg;
    cfg_sub.backgrounds = {"#3"};
    auto sub = generate_manifest(cfg_sub);

    // the same (identity, attributes) key gets the same seed in both manifests
    auto schema = full.schema;
    for (const auto& r : sub.records) {
        bool found = false;
        for (const auto& f : full.records) {
            if (f.identity_id == r.identity_id && f.background == r.background &&
                f.weather == r.weather && f.illumination == r.illumination &&
                f.viewpoint == r.viewpoint) {
                CHECK(f.render_seed == r.render_seed);
                found = true;
            }
        }
        CHECK(found);
    }

    // a different master seed changes every render seed
    auto cfg2 = cfg;
    cfg2.master_seed = 12;
    auto other = generate_manifest(cfg2);
    for (std::size_t i = 0; i < full.records.size(); ++i)
        CHECK(full.records[i].render_seed != other.records[i].render_seed);
}

TEST_CASE("generate_manifest rejects bad configs") {
    GeneratorConfig cfg;
    cfg.num_identities = 0;
    CHECK_THROWS_AS(generate_manifest(cfg), Error);

    cfg = GeneratorConfig{};
    cfg.weathers.clear();
    try {
        generate_manifest(cfg);
        FAIL("expected EmptyAttributeSet");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_attribute_set);
    }

    cfg = GeneratorConfig{};
    cfg.image_width = 8;
    CHECK_THROWS_AS(generate_manifest(cfg), Error);

    cfg = GeneratorConfig{};
    cfg.backgrounds = {"#42"};
    try {
        generate_manifest(cfg);
        FAIL("expected BadLabel");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::bad_label);
    }
}

TEST_CASE("slice_manifest filters records and preserves order") {
    GeneratorConfig cfg;
    cfg.num_identities = 4;
    cfg.master_seed = 5;
    auto m = generate_manifest(cfg);

    SliceFilter f;
    f.backgrounds = std::vector<std::string>{"#6"};
    auto sliced = slice_manifest(m, f);
    CHECK(sliced.records.size() == 4u * 7 * 8 * 12);
    for (const auto& r : sliced.records) CHECK(m.schema.backgrounds[r.background] == "#6");

    // record order preserved
    std::size_t pos = 0;
    for (const auto& r : m.records) {
        if (pos < sliced.records.size() && r == sliced.records[pos]) ++pos;
    }
    CHECK(pos == sliced.records.size());

    SECTION("id_limit takes the first identities in manifest order") {
        auto limited = slice_manifest(m, SliceFilter{}, 2);
        CHECK(limited.records.size() == 2u * 6048);
        for (const auto& r : limited.records) CHECK(r.identity_id < 2);
        CHECK_THROWS_AS(slice_manifest(m, SliceFilter{}, 5), Error);
    }

    SECTION("empty filter dimension is an error") {
        SliceFilter empty;
        empty.weathers = std::vector<std::string>{};
        try {
            slice_manifest(m, empty);
            FAIL("expected EmptyAttributeSet");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::empty_attribute_set);
        }
    }
}

TEST_CASE("slice composition equals sliced intersection") {
    GeneratorConfig cfg;
    cfg.num_identities = 2;
    cfg.master_seed = 3;
    auto m = generate_manifest(cfg);
    auto schema = m.schema;

    Rng rng(99);
    for (int trial = 0; trial < 12; ++trial) {
        // draw two filters with guaranteed non-empty intersection per dimension
        auto draw_pair = [&](std::size_t n, std::vector<int>& fa, std::vector<int>& fb) {
            int common = static_cast<int>(rng.next_below(n));
            fa = {common};
            fb = {common};
            for (std::size_t v = 0; v < n; ++v) {
                if (static_cast<int>(v) == common) continue;
                if (rng.bernoulli(0.4)) fa.push_back(static_cast<int>(v));
                if (rng.bernoulli(0.4)) fb.push_back(static_cast<int>(v));
            }
        };
        std::vector<int> ba, bb, wa, wb;
        draw_pair(schema.backgrounds.size(), ba, bb);
        draw_pair(schema.weathers.size(), wa, wb);

        auto labels = [&](const std::vector<int>& idx, const std::vector<std::string>& all) {
            std::vector<std::string> out;
            for (int i : idx) out.push_back(all[static_cast<std::size_t>(i)]);
            return out;
        };
        SliceFilter f1, f2, inter;
        f1.backgrounds = labels(ba, schema.backgrounds);
        f2.backgrounds = labels(bb, schema.backgrounds);
        f1.weathers = labels(wa, schema.weathers);
        f2.weathers = labels(wb, schema.weathers);

        std::vector<std::string> bi, wi;
        for (int x : ba)
            if (std::find(bb.begin(), bb.end(), x) != bb.end())
                bi.push_back(schema.backgrounds[static_cast<std::size_t>(x)]);
        for (int x : wa)
            if (std::find(wb.begin(), wb.end(), x) != wb.end())
                wi.push_back(schema.weathers[static_cast<std::size_t>(x)]);
        inter.backgrounds = bi;
        inter.weathers = wi;

        auto composed = slice_manifest(slice_manifest(m, f1), f2);
        auto direct = slice_manifest(m, inter);
        CHECK(serialize_manifest(composed) == serialize_manifest(direct));
    }
}

TEST_CASE("manifest persistence round-trips byte-identically") {
    auto cfg = small_config();
    auto m = generate_manifest(cfg);
    auto path = temp_path("gpr_manifest_roundtrip.txt");
    persist_manifest(m, path);
    auto loaded = load_manifest(path);
    CHECK(serialize_manifest(loaded) == serialize_manifest(m));
    CHECK(loaded.records == m.records);
    std::remove(path.c_str());
}

TEST_CASE("load_manifest reports malformed input precisely") {
    auto path = temp_path("gpr_manifest_bad.txt");

    SECTION("empty file: missing header") {
        std::ofstream(path) << "";
        try {
            load_manifest(path);
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::format_error);
            CHECK(std::string(e.what()).find("missing header") != std::string::npos);
        }
    }

    SECTION("unknown weather label is named") {
        std::ofstream(path) << "gpr-manifest v1\n0,#1,thunder,09~12,0,1,42\n";
        try {
            load_manifest(path);
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::format_error);
            CHECK(std::string(e.what()).find("thunder") != std::string::npos);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }

    SECTION("wrong field count names the line") {
        std::ofstream(path) << "gpr-manifest v1\n0,#1,clear,09~12,0,1\n";
        try {
            load_manifest(path);
            FAIL("expected FormatError");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
            CHECK(std::string(e.what()).find("field") != std::string::npos);
        }
    }

    SECTION("camera must match the background index") {
        std::ofstream(path) << "gpr-manifest v1\n0,#1,clear,09~12,0,3,42\n";
        CHECK_THROWS_AS(load_manifest(path), Error);
    }

    SECTION("duplicate records are rejected") {
        std::ofstream(path) << "gpr-manifest v1\n0,#1,clear,09~12,0,1,42\n0,#1,clear,09~12,0,1,42\n";
        CHECK_THROWS_AS(load_manifest(path), Error);
    }

    std::remove(path.c_str());
}

TEST_CASE("limit_records_per_identity caps deterministically") {
    auto cfg = small_config();
    auto m = generate_manifest(cfg); // 8 records per id
    auto capped = limit_records_per_identity(m, 3, 7);
    auto again = limit_records_per_identity(m, 3, 7);
    CHECK(serialize_manifest(capped) == serialize_manifest(again));
    for (auto id : capped.identities_in_order()) {
        int count = 0;
        for (const auto& r : capped.records) count += (r.identity_id == id);
        CHECK(count == 3);
    }
    CHECK(limit_records_per_identity(m, 100, 7).records.size() == m.records.size());
}
