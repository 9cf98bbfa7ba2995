#include "simgen/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace painfair {

namespace {

// Latent AU intensities are drawn from a narrow band around 2 so that
// injected shifts of a point or two never saturate the 0..5 scale.
constexpr double kLatentLo = 1.5;
constexpr double kLatentHi = 2.5;

int clamp_round(double v, int lo, int hi) {
  int r = static_cast<int>(std::lround(v));
  return std::clamp(r, lo, hi);
}

std::string zero_pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

void SimConfig::validate() const {
  if (n_subjects < 1) throw ArgumentError("simulate: n_subjects must be >= 1");
  if (assessors_per_image < 1) throw ArgumentError("simulate: assessors_per_image must be >= 1");
  if (noise_sd < 0.0) throw ArgumentError("simulate: noise_sd must be >= 0");
  if (landmark_noise_sd < 0.0) throw ArgumentError("simulate: landmark_noise_sd must be >= 0");
  if (n_landmarks < 1) throw ArgumentError("simulate: n_landmarks must be >= 1");
}

SimResult simulate(const SimConfig& config) {
  config.validate();

  Rng subject_rng(derive_seed(config.seed, 1));
  Rng record_rng(derive_seed(config.seed, 2));
  Rng landmark_rng(derive_seed(config.seed, 3));

  std::vector<CounterfactualGroup> groups;
  std::vector<AssessmentRecord> records;
  std::map<std::string, LandmarkSet> landmarks;
  GroundTruth truth;
  truth.config = config;

  for (int s = 0; s < config.n_subjects; ++s) {
    SubjectTruth st;
    st.subject_id = "subj-" + zero_pad(s + 1, 4);
    for (int k = 0; k < 5; ++k) st.latent_au[k] = subject_rng.uniform(kLatentLo, kLatentHi);
    st.latent_au[5] = subject_rng.uniform();  // latent eye-closure propensity

    st.landmark_template.reserve(config.n_landmarks);
    for (int p = 0; p < config.n_landmarks; ++p)
      st.landmark_template.push_back(
          {subject_rng.uniform(0.25, 0.75), subject_rng.uniform(0.25, 0.75)});

    // Original attributes rotate so every combination appears.
    Race race_i = (s % 2 == 0) ? Race::Black : Race::White;
    AgeBand age_i = ((s / 2) % 2 == 0) ? AgeBand::Young : AgeBand::Senior;
    Gender gender = ((s / 4) % 2 == 0) ? Gender::Female : Gender::Male;

    CounterfactualGroup group;
    group.subject_id = st.subject_id;
    for (VariantTag tag : kAllVariants) {
      bool flip_race = tag == VariantTag::S || tag == VariantTag::SA;
      bool flip_age = tag == VariantTag::A || tag == VariantTag::SA;
      ImageMeta meta;
      meta.subject_id = st.subject_id;
      meta.image_id = st.subject_id + "-" + to_string(tag);
      meta.variant = tag;
      meta.race = flip_race ? flip(race_i) : race_i;
      meta.age_band = flip_age ? flip(age_i) : age_i;
      meta.gender = gender;
      meta.deepfake_flagged = false;
      meta.verified_same_person = true;
      group.variant(tag) = meta;
    }
    groups.push_back(group);

    for (VariantTag tag : kAllVariants) {
      const ImageMeta& meta = group.variant(tag);

      // Observation bias for this image. The PSPI-scale betas land on AU4
      // (overflowing into AU9) because AU4 enters PSPI with coefficient 1.
      std::array<double, 6> bias{};
      double pspi_shift = 0.0;
      if (config.au_bias_profile) {
        const auto& profile = *config.au_bias_profile;
        for (int k = 0; k < 6; ++k) {
          if (profile[k] > 0.0 && meta.race == Race::White) bias[k] += profile[k];
          if (profile[k] < 0.0 && meta.race == Race::Black) bias[k] += -profile[k];
        }
      } else if (meta.race == Race::White) {
        pspi_shift += config.beta_race;
      }
      if (meta.age_band == AgeBand::Senior) pspi_shift += config.beta_age;
      if (pspi_shift != 0.0) {
        double au4_room = std::max(0.0, 5.0 - st.latent_au[0]);
        double on_au4 = std::min(pspi_shift, au4_room);
        bias[0] += on_au4;
        bias[3] += pspi_shift - on_au4;
      }

      for (int a = 0; a < config.assessors_per_image; ++a) {
        AssessmentRecord rec;
        rec.image_id = meta.image_id;
        rec.assessor_id = "sim-" + zero_pad(s + 1, 4) + "-" + to_string(tag) + "-" +
                          zero_pad(a + 1, 2);
        rec.platform = Platform::A;
        std::array<int, 6> observed{};
        for (int k = 0; k < 5; ++k) {
          double v = st.latent_au[k] + bias[k] + config.noise_sd * record_rng.normal();
          observed[k] = clamp_round(v, 0, 5);
        }
        double v43 = st.latent_au[5] + bias[5] + config.noise_sd * record_rng.normal();
        observed[5] = clamp_round(v43, 0, 1);
        rec.au = AuVector::from_array(observed);
        records.push_back(std::move(rec));
      }

      LandmarkSet set;
      set.points.reserve(st.landmark_template.size());
      for (const auto& pt : st.landmark_template) {
        double x = pt[0] + config.landmark_noise_sd * landmark_rng.normal();
        double y = pt[1] + config.landmark_noise_sd * landmark_rng.normal();
        set.points.push_back({std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)});
      }
      landmarks.emplace(meta.image_id, std::move(set));
    }
    truth.subjects.push_back(std::move(st));
  }

  SimResult result;
  result.dataset = Dataset::build(std::move(groups), std::move(records), std::move(landmarks));
  result.truth = std::move(truth);
  return result;
}

namespace {

nlohmann::ordered_json config_to_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["n_subjects"] = c.n_subjects;
  j["assessors_per_image"] = c.assessors_per_image;
  j["beta_race"] = c.beta_race;
  j["beta_age"] = c.beta_age;
  if (c.au_bias_profile) j["au_bias_profile"] = *c.au_bias_profile;
  j["noise_sd"] = c.noise_sd;
  j["landmark_noise_sd"] = c.landmark_noise_sd;
  j["n_landmarks"] = c.n_landmarks;
  j["seed"] = c.seed;
  return j;
}

SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  c.n_subjects = j.at("n_subjects").get<int>();
  c.assessors_per_image = j.at("assessors_per_image").get<int>();
  c.beta_race = j.at("beta_race").get<double>();
  c.beta_age = j.at("beta_age").get<double>();
  if (j.contains("au_bias_profile"))
    c.au_bias_profile = j.at("au_bias_profile").get<std::array<double, 6>>();
  c.noise_sd = j.at("noise_sd").get<double>();
  c.landmark_noise_sd = j.at("landmark_noise_sd").get<double>();
  c.n_landmarks = j.at("n_landmarks").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

}  // namespace

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["config"] = config_to_json(truth.config);
  nlohmann::ordered_json subjects = nlohmann::ordered_json::array();
  for (const auto& s : truth.subjects) {
    nlohmann::ordered_json e;
    e["subject_id"] = s.subject_id;
    e["latent_au"] = s.latent_au;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& p : s.landmark_template) pts.push_back({p[0], p[1]});
    e["landmark_template"] = std::move(pts);
    subjects.push_back(std::move(e));
  }
  doc["subjects"] = std::move(subjects);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(1) << "\n";
}

GroundTruth read_ground_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  GroundTruth truth;
  truth.config = config_from_json(doc.at("config"));
  for (const auto& e : doc.at("subjects")) {
    SubjectTruth s;
    s.subject_id = e.at("subject_id").get<std::string>();
    s.latent_au = e.at("latent_au").get<std::array<double, 6>>();
    for (const auto& p : e.at("landmark_template"))
      s.landmark_template.push_back({p[0].get<double>(), p[1].get<double>()});
    truth.subjects.push_back(std::move(s));
  }
  return truth;
}

std::vector<RecoveryRow> recovery_report(const Dataset& dataset, const GroundTruth& truth) {
  if (truth.subjects.size() != dataset.groups().size())
    throw InvariantError("recovery_report: ground truth lists " +
                         std::to_string(truth.subjects.size()) + " subjects, dataset has " +
                         std::to_string(dataset.groups().size()));
  for (const auto& s : truth.subjects)
    dataset.group_by_subject(s.subject_id);  // throws if missing

  std::vector<RecoveryRow> rows;
  for (Attribute axis : {Attribute::Race, Attribute::Age}) {
    // With an AU-level profile the PSPI-scale race beta is not defined, so
    // that row is omitted.
    if (axis == Attribute::Race && truth.config.au_bias_profile) continue;
    BiasEstimate est = bias_estimate(dataset, axis, Filter{});
    RecoveryRow row;
    row.axis = axis;
    if (axis == Attribute::Race) {
      // bias_estimate reports Black minus White; the injected beta points
      // toward White.
      row.injected = truth.config.beta_race;
      row.estimated = -est.diff;
    } else {
      row.injected = truth.config.beta_age;
      row.estimated = est.diff;
    }
    row.se = est.diff_se;
    double q = t_quantile(0.975, est.df);
    row.ci_lo = row.estimated - q * row.se;
    row.ci_hi = row.estimated + q * row.se;
    row.covered = row.ci_lo <= row.injected && row.injected <= row.ci_hi;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace painfair
