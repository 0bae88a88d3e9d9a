#include "uniq/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "uniq/errors.hpp"

namespace uniq {

namespace {

int parse_int(const std::string& s, const std::string& what) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError("bad integer in " + what + ": '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const std::string& what) {
    if (s.empty()) throw ParseError("empty number in " + what);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw ParseError("bad number in " + what + ": '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

QualityCondition QualityCondition::motion_blur(int length) {
    if (length < 3 || length % 2 == 0)
        throw BadLength("blur length must be an odd integer >= 3, got " + std::to_string(length));
    QualityCondition c;
    c.kind = Kind::MotionBlur;
    c.blur_length = length;
    return c;
}

QualityCondition QualityCondition::gaussian_noise(double variance) {
    if (!(variance > 0.0))
        throw BadVariance("noise variance must be > 0, got " + std::to_string(variance));
    QualityCondition c;
    c.kind = Kind::GaussianNoise;
    c.noise_variance = variance;
    return c;
}

QualityCondition QualityCondition::pose(std::string camera) {
    if (camera.empty()) throw ParseError("pose label must be non-empty");
    QualityCondition c;
    c.kind = Kind::Pose;
    c.pose_camera = std::move(camera);
    return c;
}

QualityCondition QualityCondition::parse(const std::string& tag) {
    if (tag == "baseline") return baseline();
    if (tag.rfind("blur:", 0) == 0)
        return motion_blur(parse_int(tag.substr(5), "blur tag"));
    if (tag.rfind("noise:", 0) == 0)
        return gaussian_noise(parse_double(tag.substr(6), "noise tag"));
    if (tag.rfind("pose:", 0) == 0) return pose(tag.substr(5));
    throw ParseError("unknown condition tag: '" + tag + "'");
}

std::string QualityCondition::tag() const {
    switch (kind) {
        case Kind::Baseline:
            return "baseline";
        case Kind::MotionBlur:
            return "blur:" + std::to_string(blur_length);
        case Kind::GaussianNoise: {
            // Shortest decimal that round-trips, so parse(tag()) == *this.
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", noise_variance);
            double rt = std::strtod(buf, nullptr);
            for (int prec = 1; prec < 17; ++prec) {
                char cand[40];
                std::snprintf(cand, sizeof(cand), "%.*g", prec, noise_variance);
                if (std::strtod(cand, nullptr) == noise_variance) {
                    return std::string("noise:") + cand;
                }
            }
            (void)rt;
            return std::string("noise:") + buf;
        }
        case Kind::Pose:
            return "pose:" + pose_camera;
    }
    throw Error("unreachable condition kind");
}

bool QualityCondition::operator==(const QualityCondition& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::Baseline:
            return true;
        case Kind::MotionBlur:
            return blur_length == other.blur_length;
        case Kind::GaussianNoise:
            return noise_variance == other.noise_variance;
        case Kind::Pose:
            return pose_camera == other.pose_camera;
    }
    return false;
}

std::vector<std::string> DatasetManifest::subject_ids() const {
    std::set<std::string> ids;
    for (const auto& e : entries) ids.insert(e.subject_id);
    return {ids.begin(), ids.end()};
}

bool DatasetManifest::has_subject(const std::string& subject_id) const {
    return std::any_of(entries.begin(), entries.end(),
                       [&](const ManifestEntry& e) { return e.subject_id == subject_id; });
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open manifest: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty manifest: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kManifestHeader)
        throw ParseError("bad manifest header, expected '" + std::string(kManifestHeader) +
                         "', got '" + line + "'");

    DatasetManifest manifest;
    std::set<std::string> seen_paths;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 8)
            throw MissingField("manifest line " + std::to_string(lineno) + ": expected 8 fields, got " +
                               std::to_string(fields.size()));
        for (std::size_t i = 0; i < 4; ++i)
            if (fields[i].empty())
                throw MissingField("manifest line " + std::to_string(lineno) + ": empty field " +
                                   std::to_string(i + 1));

        ManifestEntry e;
        e.image_path = fields[0];
        e.subject_id = fields[1];
        e.session_id = fields[2];
        e.condition = QualityCondition::parse(fields[3]);
        e.left_eye_x = parse_double(fields[4], "lx");
        e.left_eye_y = parse_double(fields[5], "ly");
        e.right_eye_x = parse_double(fields[6], "rx");
        e.right_eye_y = parse_double(fields[7], "ry");

        if (!seen_paths.insert(e.image_path).second)
            throw DuplicatePath("duplicate image_path: " + e.image_path);
        manifest.entries.push_back(std::move(e));
    }
    if (manifest.entries.empty())
        throw ParseError("manifest has no entries: " + path.string());
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot write manifest: " + path.string());
    out << kManifestHeader << "\n";
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& e : manifest.entries) {
        out << e.image_path << ',' << e.subject_id << ',' << e.session_id << ','
            << e.condition.tag() << ',' << num(e.left_eye_x) << ',' << num(e.left_eye_y) << ','
            << num(e.right_eye_x) << ',' << num(e.right_eye_y) << '\n';
    }
    if (!out) throw IOError("short write: " + path.string());
}

ImpostorSet build_impostor_set(const DatasetManifest& manifest,
                               const std::string& probe_subject,
                               const PoolFilter& filter) {
    if (!manifest.has_subject(probe_subject))
        throw Error("probe subject not in manifest: " + probe_subject);

    // One entry per subject: lexicographically smallest image_path.
    std::map<std::string, const ManifestEntry*> best;
    for (const auto& e : manifest.entries) {
        if (e.subject_id == probe_subject) continue;
        if (filter && !filter(e)) continue;
        auto [it, inserted] = best.try_emplace(e.subject_id, &e);
        if (!inserted && e.image_path < it->second->image_path) it->second = &e;
    }
    if (best.size() < 2)
        throw EmptyImpostorSet("fewer than 2 impostor subjects for probe " + probe_subject);

    ImpostorSet set;
    set.probe_subject = probe_subject;
    set.members.reserve(best.size());
    for (const auto& [id, entry] : best) set.members.push_back(*entry);
    return set;
}

}  // namespace uniq
