#include "sentipred/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sentipred/csv.hpp"
#include "sentipred/features.hpp"
#include "sentipred/lexicon.hpp"
#include "sentipred/regression.hpp"
#include "sentipred/text.hpp"

namespace fs = std::filesystem;

namespace sentipred {

namespace {

struct Artifacts {
    std::string corpus, market, buckets, tokens, lexicon, model, cv_metrics, classified, trust,
        indicators, analysis_dir, models_dir, evaluation, report_csv, report_json;

    explicit Artifacts(const PipelineConfig& c) {
        const std::string base = c.out_dir + "/";
        corpus = base + "corpus.csv";
        market = base + "market.csv";
        buckets = base + "buckets.csv";
        tokens = base + "tokens.jsonl";
        lexicon = base + "lexicon.jsonl";
        model = base + "model.json";
        cv_metrics = base + "cv_metrics.json";
        classified = base + "classified.csv";
        trust = base + "trust.json";
        indicators = base + "indicators.csv";
        analysis_dir = base + "analysis";
        models_dir = base + "models";
        evaluation = base + "evaluation.json";
        report_csv = base + "report.csv";
        report_json = base + "report.json";
    }

    std::string m0(const std::string& target) const {
        return models_dir + "/m0_" + target + ".json";
    }
    std::string m1(const std::string& target) const {
        return models_dir + "/m1_" + target + ".json";
    }
};

const std::vector<std::string> kTargets = {"close", "return"};
const std::vector<std::string> kCandidateNames = {"index1", "index2",         "index3",
                                                  "index4", "count", "countWithLikes"};

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::runtime_error("config key '" + key + "': expected true/false, got '" + v + "'");
}

long long parse_int(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const long long n = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw std::runtime_error("config key '" + key + "': expected integer, got '" + v + "'");
    return n;
}

double parse_real(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw std::runtime_error("config key '" + key + "': expected number, got '" + v + "'");
    return x;
}

std::string stage_producing(const std::string& artifact, const Artifacts& a) {
    if (artifact == a.corpus || artifact == a.market || artifact == a.buckets) return "ingest";
    if (artifact == a.tokens) return "preprocess";
    if (artifact == a.lexicon) return "build-lexicon";
    if (artifact == a.model || artifact == a.cv_metrics) return "train";
    if (artifact == a.classified) return "classify";
    if (artifact == a.trust) return "trust";
    if (artifact == a.indicators) return "indices";
    if (artifact == a.evaluation) return "evaluate";
    if (artifact.rfind(a.models_dir, 0) == 0) return "fit";
    if (artifact.rfind(a.analysis_dir, 0) == 0) return "analyze";
    return "";
}

void require_artifacts(const std::vector<std::string>& needed, const Artifacts& a) {
    for (const std::string& path : needed) {
        if (fs::exists(path)) continue;
        const std::string producer = stage_producing(path, a);
        if (producer.empty())
            throw std::runtime_error("missing input file '" + path + "'");
        throw std::runtime_error("missing upstream artifact '" + path + "'; run stage '" +
                                 producer + "' first");
    }
}

std::string provenance(const PipelineConfig& c) {
    return "config_hash=" + config_hash(c) + " seed=" + std::to_string(c.seed);
}

// ---- intermediate artifact I/O ----

struct TokDoc {
    std::string id;
    Label label = Label::unlabeled;
    std::vector<std::string> unigrams;
    std::vector<std::string> bigrams;
};

void write_tokens(const std::vector<TokDoc>& docs, const std::string& path,
                  const std::string& prov) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << nlohmann::json{{"provenance", prov}, {"count", docs.size()}}.dump() << '\n';
    for (const TokDoc& d : docs) {
        out << nlohmann::json{{"id", d.id},
                              {"label", to_string(d.label)},
                              {"unigrams", d.unigrams},
                              {"bigrams", d.bigrams}}
                   .dump()
            << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<TokDoc> read_tokens(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty tokens file");
    std::size_t expected = 0;
    try {
        expected = nlohmann::json::parse(line).at("count").get<std::size_t>();
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": malformed header: " + e.what());
    }
    std::vector<TokDoc> docs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        TokDoc d;
        d.id = j.at("id").get<std::string>();
        d.label = label_from_string(j.at("label").get<std::string>());
        d.unigrams = j.at("unigrams").get<std::vector<std::string>>();
        d.bigrams = j.at("bigrams").get<std::vector<std::string>>();
        docs.push_back(std::move(d));
    }
    if (docs.size() != expected)
        throw std::runtime_error(path + ": truncated tokens file: header declares " +
                                 std::to_string(expected) + " documents, found " +
                                 std::to_string(docs.size()));
    return docs;
}

struct ClassifiedRow {
    std::string id;
    std::string source;  // gold | predicted
    Label label = Label::unlabeled;
    double score = 0.0;
};

void write_classified(const std::vector<ClassifiedRow>& rows, const std::string& path,
                      const std::string& prov) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# " << prov << '\n';
    out << "id,label_source,label,score\n";
    for (const ClassifiedRow& r : rows) {
        csv::write_record(out, {r.id, r.source, to_string(r.label), format_double(r.score)});
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::map<std::string, ClassifiedComment> read_classified(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    csv::Reader reader(in, /*skip_comments=*/true);
    auto header = reader.next();
    if (!header || (*header)[0] != "id")
        throw std::runtime_error(path + ": bad classified header");
    std::map<std::string, ClassifiedComment> out;
    while (auto rec = reader.next()) {
        if (rec->size() != 4)
            throw std::runtime_error(path + ":" + std::to_string(reader.line_number()) +
                                     ": expected 4 fields");
        ClassifiedComment c;
        c.label = label_from_string((*rec)[2]);
        c.score = std::strtod((*rec)[3].c_str(), nullptr);
        out[(*rec)[0]] = c;
    }
    return out;
}

void write_trust(const TrustTable& t, const std::string& path, const std::string& prov) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (const auto& [user, tc] : t.coefficients) coeffs[user] = tc;
    const nlohmann::json j = {{"_provenance", prov},
                              {"stock", t.stock_symbol},
                              {"default_tc", t.default_tc},
                              {"window_start", format_date(t.window_start)},
                              {"window_end", format_date(t.window_end)},
                              {"avg_comment_count", t.avg_comment_count},
                              {"coefficients", coeffs}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

TrustTable read_trust(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": malformed trust file: " + std::string(e.what()));
    }
    TrustTable t;
    t.stock_symbol = j.at("stock").get<std::string>();
    t.default_tc = j.at("default_tc").get<double>();
    t.window_start = parse_date(j.at("window_start").get<std::string>());
    t.window_end = parse_date(j.at("window_end").get<std::string>());
    t.avg_comment_count = j.at("avg_comment_count").get<double>();
    for (const auto& [user, tc] : j.at("coefficients").items())
        t.coefficients[user] = tc.get<double>();
    return t;
}

// ---- shared stage plumbing ----

DailyBuckets rebuild_buckets(const PipelineConfig& c, const CommentCorpus& corpus,
                             const std::vector<MarketBar>& bars) {
    return bucket_by_trading_day(corpus, bars, parse_time_of_day(c.cutoff),
                                 c.input_utc_offset_minutes);
}

struct SeriesFrame {
    Series close;                    // over all trading dates
    Series ret;                      // over trading dates[1:]
    std::vector<Series> candidates;  // aligned with close's dates

    Series target(const std::string& name) const {
        if (name == "close") return close;
        if (name == "return") return ret;
        throw std::runtime_error("unknown target '" + name + "'");
    }
    /// Candidates re-aligned to a target's date axis.
    std::vector<Series> candidates_for(const std::string& name) const {
        if (name == "close") return candidates;
        std::vector<Series> out;
        for (const Series& c : candidates) {
            Series s;
            s.name = c.name;
            s.dates.assign(c.dates.begin() + 1, c.dates.end());
            s.values.assign(c.values.begin() + 1, c.values.end());
            out.push_back(std::move(s));
        }
        return out;
    }
};

SeriesFrame build_series_frame(const std::vector<MarketBar>& bars,
                               const std::vector<DailyIndicatorRow>& rows) {
    if (bars.size() != rows.size())
        throw std::runtime_error("indicator rows and market bars have different lengths");
    SeriesFrame f;
    f.close.name = "close";
    for (std::size_t i = 0; i < bars.size(); ++i) {
        if (bars[i].date != rows[i].date)
            throw std::runtime_error("indicator dates do not match market dates at row " +
                                     std::to_string(i));
        f.close.dates.push_back(bars[i].date);
        f.close.values.push_back(bars[i].close);
    }
    f.ret = daily_return(f.close);
    f.ret.name = "return";

    for (const std::string& name : kCandidateNames) {
        Series s;
        s.name = name;
        s.dates = f.close.dates;
        for (const DailyIndicatorRow& r : rows) {
            double v = 0.0;
            if (name == "index1") v = r.index1;
            else if (name == "index2") v = r.index2;
            else if (name == "index3") v = r.index3;
            else if (name == "index4") v = r.index4;
            else if (name == "count") v = static_cast<double>(r.comment_count);
            else v = static_cast<double>(r.count_with_likes);
            if (std::isnan(v))
                throw std::runtime_error(
                    "candidate series '" + name + "' has a missing value on " +
                    format_date(r.date) +
                    "; rerun indices with missing_policy=neutral or carry_forward");
            s.values.push_back(v);
        }
        f.candidates.push_back(std::move(s));
    }
    return f;
}

int effective_max_lag(int configured, std::size_t series_len) {
    const int cap = static_cast<int>(series_len) - 4;
    const int lag = std::min(configured, cap);
    if (lag < 1)
        throw std::runtime_error("series of length " + std::to_string(series_len) +
                                 " is too short for lag analysis");
    return lag;
}

// ---- stages ----

void stage_ingest(const PipelineConfig& c) {
    const Artifacts a(c);
    const CommentCorpus corpus =
        load_comments(c.comments_path,
                      c.comments_format == "jsonl" ? CommentFormat::jsonl : CommentFormat::csv,
                      c.stock_symbol, c.input_utc_offset_minutes);
    const std::vector<MarketBar> bars = load_market(c.market_path);
    const DailyBuckets buckets = rebuild_buckets(c, corpus, bars);

    fs::create_directories(c.out_dir);
    const std::string prov = provenance(c);
    save_comments_csv(corpus, a.corpus, prov);
    save_market_csv(bars, a.market, prov);

    std::ofstream out(a.buckets, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + a.buckets + "' for writing");
    out << "# " << prov << '\n' << "id,trading_date\n";
    for (const auto& [date, comments] : buckets.buckets)
        for (const Comment& cm : comments)
            csv::write_record(out, {cm.id, format_date(date)});
}

void stage_preprocess(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.corpus}, a);
    const CommentCorpus corpus = load_comments(a.corpus, CommentFormat::csv, c.stock_symbol, 0);
    const DictionaryStemmer dict = DictionaryStemmer::from_file(c.stemmer_dict_path);
    const auto stoplist = load_stopwords(c.stopwords_path);

    std::vector<TokDoc> docs;
    docs.reserve(corpus.comments.size());
    for (const Comment& cm : corpus.comments) {
        const std::vector<Token> tokens = preprocess(cm.text, dict, stoplist);
        NgramSet ngrams = extract_ngrams(tokens, &dict);
        TokDoc d;
        d.id = cm.id;
        d.label = cm.label;
        d.unigrams = std::move(ngrams.unigrams);
        d.bigrams = std::move(ngrams.bigrams);
        docs.push_back(std::move(d));
    }
    write_tokens(docs, a.tokens, provenance(c));
}

std::vector<TokenizedDoc> labeled_docs(const std::vector<TokDoc>& docs) {
    std::vector<TokenizedDoc> out;
    for (const TokDoc& d : docs) {
        if (d.label == Label::unlabeled) continue;
        out.push_back(TokenizedDoc{d.unigrams, d.bigrams, d.label});
    }
    return out;
}

void stage_build_lexicon(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.tokens}, a);
    const auto docs = labeled_docs(read_tokens(a.tokens));
    const SentimentLexicon lexicon = build_lexicon(docs, c.df_threshold, c.smoothing);
    save_lexicon(lexicon, a.lexicon, provenance(c));
}

nlohmann::json metrics_to_json(const EvalMetrics& m) {
    auto cls = [](const ClassMetrics& c) {
        return nlohmann::json{{"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1},
                              {"support", c.support}};
    };
    return {{"accuracy", m.accuracy},
            {"recall_macro", m.recall_macro},
            {"f_macro", m.f_macro},
            {"bullish", cls(m.bullish)},
            {"bearish", cls(m.bearish)}};
}

TrainParams train_params(const PipelineConfig& c) {
    TrainParams p;
    p.bagging_size = c.bagging_size;
    p.pruning_confidence = c.pruning_confidence;
    p.max_depth = c.max_depth;
    p.min_leaf = c.min_leaf;
    return p;
}

void stage_train(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.tokens, a.lexicon}, a);
    const auto docs = read_tokens(a.tokens);
    const SentimentLexicon lexicon = load_lexicon(a.lexicon);
    const Algorithm algo = algorithm_from_string(c.algorithm);
    const TrainParams params = train_params(c);

    std::vector<FeatureVector> with_score, without_score;
    for (const TokDoc& d : docs) {
        if (d.label == Label::unlabeled) continue;
        const NgramSet ngrams{d.unigrams, d.bigrams};
        FeatureVector v = featurize(ngrams, lexicon, true);
        v.label = d.label;
        with_score.push_back(v);
        FeatureVector w = featurize(ngrams, lexicon, false);
        w.label = d.label;
        without_score.push_back(std::move(w));
    }

    // Score-feature ablation: report both settings side by side.
    const EvalMetrics metrics_with = cross_validate(
        with_score, schema_from_lexicon(lexicon, true), algo, params, c.folds, c.seed);
    const EvalMetrics metrics_without = cross_validate(
        without_score, schema_from_lexicon(lexicon, false), algo, params, c.folds, c.seed);

    const auto& train_vecs = c.include_score ? with_score : without_score;
    const TrainedClassifier clf = train(
        train_vecs, schema_from_lexicon(lexicon, c.include_score), algo, params, c.seed);
    clf.save(a.model, provenance(c));

    const nlohmann::json j = {{"_provenance", provenance(c)},
                              {"algorithm", c.algorithm},
                              {"folds", c.folds},
                              {"seed", c.seed},
                              {"with_score", metrics_to_json(metrics_with)},
                              {"without_score", metrics_to_json(metrics_without)}};
    std::ofstream out(a.cv_metrics, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + a.cv_metrics + "' for writing");
    out << j.dump(2) << '\n';
}

void stage_classify(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.tokens, a.lexicon}, a);
    const auto docs = read_tokens(a.tokens);
    const SentimentLexicon lexicon = load_lexicon(a.lexicon);

    const bool any_unlabeled =
        std::any_of(docs.begin(), docs.end(),
                    [](const TokDoc& d) { return d.label == Label::unlabeled; });
    std::optional<TrainedClassifier> clf;
    if (any_unlabeled) {
        require_artifacts({a.model}, a);
        clf = TrainedClassifier::load(a.model);
    }

    std::vector<ClassifiedRow> rows;
    rows.reserve(docs.size());
    for (const TokDoc& d : docs) {
        const NgramSet ngrams{d.unigrams, d.bigrams};
        ClassifiedRow row;
        row.id = d.id;
        row.score = featurize(ngrams, lexicon, true).comment_score.value_or(0.0);
        if (d.label != Label::unlabeled) {
            row.source = "gold";
            row.label = d.label;
        } else {
            row.source = "predicted";
            try {
                row.label =
                    clf->predict(featurize(ngrams, lexicon, clf->schema().include_score));
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string(e.what()) +
                                         "; the model is stale relative to the lexicon, rerun "
                                         "stage 'train'");
            }
        }
        rows.push_back(std::move(row));
    }
    write_classified(rows, a.classified, provenance(c));
}

std::pair<Date, Date> trust_window(const PipelineConfig& c, const std::vector<MarketBar>& bars) {
    Date start = bars.front().date;
    Date end = bars.size() >= 2 ? bars[bars.size() - 2].date : bars.back().date;
    if (!c.trust_window_start.empty()) start = parse_date(c.trust_window_start);
    if (!c.trust_window_end.empty()) end = parse_date(c.trust_window_end);
    return {start, end};
}

void stage_trust(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.corpus, a.market, a.classified}, a);
    CommentCorpus corpus = load_comments(a.corpus, CommentFormat::csv, c.stock_symbol, 0);
    const std::vector<MarketBar> bars = load_market(a.market);
    const auto classes = read_classified(a.classified);

    // Trust is computed from the classified labels (gold or predicted).
    for (Comment& cm : corpus.comments) {
        auto it = classes.find(cm.id);
        if (it != classes.end()) cm.label = it->second.label;
    }
    const DailyBuckets buckets = rebuild_buckets(c, corpus, bars);
    const auto [start, end] = trust_window(c, bars);
    TrustTable table = compute_trust(buckets, bars, start, end, c.default_tc);
    table.stock_symbol = c.stock_symbol;
    write_trust(table, a.trust, provenance(c));
}

void stage_indices(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.corpus, a.market, a.classified, a.trust}, a);
    const CommentCorpus corpus = load_comments(a.corpus, CommentFormat::csv, c.stock_symbol, 0);
    const std::vector<MarketBar> bars = load_market(a.market);
    const auto classes = read_classified(a.classified);
    const TrustTable trust = read_trust(a.trust);
    const DailyBuckets buckets = rebuild_buckets(c, corpus, bars);

    const auto rows = compute_daily_indices(buckets, classes, trust,
                                            missing_policy_from_string(c.missing_policy));
    save_indicators_csv(rows, a.indicators, provenance(c));
}

void write_correlation_csv(const std::vector<CorrelationPoint>& points, const std::string& path,
                           const std::string& prov) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# " << prov << '\n' << "lag,r,band,significant\n";
    for (const CorrelationPoint& p : points) {
        out << p.lag << ',' << format_double(p.r) << ',' << format_double(p.band) << ','
            << (p.significant ? 1 : 0) << '\n';
    }
}

void stage_analyze(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.indicators, a.market}, a);
    const SeriesFrame frame =
        build_series_frame(load_market(a.market), load_indicators_csv(a.indicators));
    fs::create_directories(a.analysis_dir);
    const std::string prov = provenance(c);

    for (const std::string& target_name : kTargets) {
        const Series target = frame.target(target_name);
        const std::vector<Series> cands = frame.candidates_for(target_name);
        const int max_lag = effective_max_lag(c.max_lag, target.size());

        write_correlation_csv(acf(target.values, max_lag),
                              a.analysis_dir + "/acf_" + target_name + ".csv", prov);

        std::ofstream granger_out(a.analysis_dir + "/granger_" + target_name + ".csv",
                                  std::ios::binary);
        granger_out << "# " << prov << '\n' << "candidate,lags,f_statistic,p_value,causal\n";
        for (const Series& cand : cands) {
            const bool constant =
                std::all_of(cand.values.begin(), cand.values.end(),
                            [&](double v) { return v == cand.values.front(); });
            if (constant) {
                granger_out << cand.name << ",,,,0\n";
                continue;
            }
            const auto points = ccf(cand.values, target.values, max_lag);
            write_correlation_csv(points, a.analysis_dir + "/ccf_" + target_name + "_" +
                                              cand.name + ".csv",
                                  prov);
            std::vector<int> lead_lags;
            for (const CorrelationPoint& p : points)
                if (p.lag < 0 && p.significant) lead_lags.push_back(-p.lag);
            std::sort(lead_lags.begin(), lead_lags.end());
            if (lead_lags.empty()) {
                granger_out << cand.name << ",,,,0\n";
                continue;
            }
            const GrangerResult g = granger_test(cand, target, lead_lags, c.alpha);
            std::string lag_list;
            for (int l : lead_lags) lag_list += (lag_list.empty() ? "" : ";") + std::to_string(l);
            granger_out << cand.name << ',' << lag_list << ',' << format_double(g.f_statistic)
                        << ',' << format_double(g.p_value) << ',' << (g.causal ? 1 : 0) << '\n';
        }
    }
}

Series head(const Series& s, std::size_t n) {
    Series out;
    out.name = s.name;
    out.dates.assign(s.dates.begin(), s.dates.begin() + n);
    out.values.assign(s.values.begin(), s.values.begin() + n);
    return out;
}

void stage_fit(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.indicators, a.market}, a);
    const SeriesFrame frame =
        build_series_frame(load_market(a.market), load_indicators_csv(a.indicators));
    fs::create_directories(a.models_dir);
    const std::string prov = provenance(c);

    for (const std::string& target_name : kTargets) {
        const Series target = frame.target(target_name);
        const std::vector<Series> cands = frame.candidates_for(target_name);
        const std::size_t n_train = train_length(target.size(), c.train_fraction);

        const Series target_train = head(target, n_train);
        std::vector<Series> cands_train;
        for (const Series& cd : cands) cands_train.push_back(head(cd, n_train));

        const int max_lag = effective_max_lag(c.max_lag, n_train);
        const RegressionModel m0 = fit_m0(target_train, max_lag, c.alpha);
        const RegressionModel m1 = build_m1(m0, target_train, cands_train, max_lag, c.alpha);
        save_model(m0, a.m0(target_name), prov);
        save_model(m1, a.m1(target_name), prov);
    }
}

void stage_evaluate(const PipelineConfig& c) {
    const Artifacts a(c);
    std::vector<std::string> needed = {a.indicators, a.market};
    for (const std::string& t : kTargets) {
        needed.push_back(a.m0(t));
        needed.push_back(a.m1(t));
    }
    require_artifacts(needed, a);
    const SeriesFrame frame =
        build_series_frame(load_market(a.market), load_indicators_csv(a.indicators));

    nlohmann::json results = nlohmann::json::object();
    for (const std::string& target_name : kTargets) {
        const Series target = frame.target(target_name);
        const std::vector<Series> cands = frame.candidates_for(target_name);
        nlohmann::json per_model = nlohmann::json::object();
        for (const char* which : {"m0", "m1"}) {
            const RegressionModel model = load_model(
                std::string(which) == "m0" ? a.m0(target_name) : a.m1(target_name));
            const EvalReport report = evaluate(model, target, cands, c.train_fraction);
            nlohmann::json points = nlohmann::json::array();
            for (const EvalPoint& p : report.points) {
                points.push_back({{"date", format_date(p.date)},
                                  {"actual", p.actual},
                                  {"predicted", p.predicted}});
            }
            per_model[which] = {{"mape_percent", report.mape},
                                {"direction_accuracy", report.direction_accuracy},
                                {"n_test", report.n_test},
                                {"mape_skipped_zero", report.mape_skipped_zero},
                                {"n_terms", model.terms.size()},
                                {"fallback_to_m0", model.fallback_to_m0},
                                {"intercept_only_warning", model.intercept_only_warning},
                                {"residuals_white", model.residuals_white},
                                {"points", points}};
        }
        results[target_name] = per_model;
    }
    const nlohmann::json j = {{"_provenance", provenance(c)},
                              {"train_fraction", c.train_fraction},
                              {"results", results}};
    std::ofstream out(a.evaluation, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + a.evaluation + "' for writing");
    out << j.dump(2) << '\n';
}

void stage_report(const PipelineConfig& c) {
    const Artifacts a(c);
    require_artifacts({a.evaluation}, a);
    std::ifstream in(a.evaluation, std::ios::binary);
    nlohmann::json eval;
    in >> eval;

    std::ofstream out(a.report_csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + a.report_csv + "' for writing");
    out << "# " << provenance(c) << '\n';
    out << "target,model,mape_percent,direction_accuracy,n_test,mape_skipped_zero,"
           "fallback_to_m0,residuals_white\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const std::string& target_name : kTargets) {
        for (const char* which : {"m0", "m1"}) {
            const auto& r = eval.at("results").at(target_name).at(which);
            out << target_name << ',' << which << ','
                << format_double(r.at("mape_percent").get<double>()) << ','
                << format_double(r.at("direction_accuracy").get<double>()) << ','
                << r.at("n_test").get<int>() << ',' << r.at("mape_skipped_zero").get<int>() << ','
                << (r.at("fallback_to_m0").get<bool>() ? 1 : 0) << ','
                << (r.at("residuals_white").get<bool>() ? 1 : 0) << '\n';
            nlohmann::json row = r;
            row.erase("points");
            row["target"] = target_name;
            row["model"] = which;
            rows.push_back(row);
        }
    }
    const nlohmann::json j = {{"_provenance", provenance(c)}, {"rows", rows}};
    std::ofstream jout(a.report_json, std::ios::binary);
    if (!jout) throw std::runtime_error("cannot open '" + a.report_json + "' for writing");
    jout << j.dump(2) << '\n';
}

}  // namespace

// ---- config ----

namespace {

const std::set<std::string> kConfigKeys = {
    "comments_path",   "market_path",        "comments_format",
    "stock_symbol",    "stemmer_dict_path",  "stopwords_path",
    "out_dir",         "df_threshold",       "smoothing",
    "algorithm",       "bagging_size",       "pruning_confidence",
    "max_depth",       "min_leaf",           "folds",
    "include_score",   "cutoff",             "input_utc_offset_minutes",
    "trust_window_start", "trust_window_end", "default_tc",
    "missing_policy",  "max_lag",            "alpha",
    "train_fraction",  "seed",
};

}  // namespace

void apply_override(PipelineConfig& c, const std::string& key, const std::string& value) {
    if (!kConfigKeys.count(key)) throw std::runtime_error("unknown config key '" + key + "'");
    if (key == "comments_path") c.comments_path = value;
    else if (key == "market_path") c.market_path = value;
    else if (key == "comments_format") c.comments_format = value;
    else if (key == "stock_symbol") c.stock_symbol = value;
    else if (key == "stemmer_dict_path") c.stemmer_dict_path = value;
    else if (key == "stopwords_path") c.stopwords_path = value;
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "df_threshold") c.df_threshold = static_cast<int>(parse_int(value, key));
    else if (key == "smoothing") c.smoothing = parse_real(value, key);
    else if (key == "algorithm") c.algorithm = value;
    else if (key == "bagging_size") c.bagging_size = static_cast<int>(parse_int(value, key));
    else if (key == "pruning_confidence") c.pruning_confidence = parse_real(value, key);
    else if (key == "max_depth") c.max_depth = static_cast<int>(parse_int(value, key));
    else if (key == "min_leaf") c.min_leaf = static_cast<int>(parse_int(value, key));
    else if (key == "folds") c.folds = static_cast<int>(parse_int(value, key));
    else if (key == "include_score") c.include_score = parse_bool(value, key);
    else if (key == "cutoff") c.cutoff = value;
    else if (key == "input_utc_offset_minutes")
        c.input_utc_offset_minutes = static_cast<int>(parse_int(value, key));
    else if (key == "trust_window_start") c.trust_window_start = value;
    else if (key == "trust_window_end") c.trust_window_end = value;
    else if (key == "default_tc") c.default_tc = parse_real(value, key);
    else if (key == "missing_policy") c.missing_policy = value;
    else if (key == "max_lag") c.max_lag = static_cast<int>(parse_int(value, key));
    else if (key == "alpha") c.alpha = parse_real(value, key);
    else if (key == "train_fraction") c.train_fraction = parse_real(value, key);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(value, key));
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    PipelineConfig c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        try {
            apply_override(c, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

std::vector<std::string> validate_config(const PipelineConfig& c, bool check_input_paths) {
    std::vector<std::string> problems;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };

    check(c.comments_format == "csv" || c.comments_format == "jsonl",
          "comments_format must be csv or jsonl, got '" + c.comments_format + "'");
    check(c.df_threshold >= 0, "df_threshold must be non-negative");
    check(c.smoothing > 0.0, "smoothing must be positive");
    try {
        algorithm_from_string(c.algorithm);
    } catch (const std::exception& e) {
        problems.emplace_back(e.what());
    }
    check(c.bagging_size >= 1, "bagging_size must be at least 1");
    check(c.max_depth >= 1, "max_depth must be at least 1");
    check(c.min_leaf >= 1, "min_leaf must be at least 1");
    check(c.folds >= 2, "folds must be at least 2");
    try {
        parse_time_of_day(c.cutoff);
    } catch (const std::exception& e) {
        problems.emplace_back(e.what());
    }
    check(c.input_utc_offset_minutes > -24 * 60 && c.input_utc_offset_minutes < 24 * 60,
          "input_utc_offset_minutes must lie within a day");
    for (const auto* w : {&c.trust_window_start, &c.trust_window_end}) {
        if (w->empty()) continue;
        try {
            parse_date(*w);
        } catch (const std::exception& e) {
            problems.emplace_back(e.what());
        }
    }
    check(c.default_tc > 0.0, "default_tc must be positive");
    try {
        missing_policy_from_string(c.missing_policy);
    } catch (const std::exception& e) {
        problems.emplace_back(e.what());
    }
    check(c.max_lag >= 1, "max_lag must be at least 1");
    check(c.alpha > 0.0 && c.alpha < 1.0, "alpha must lie in (0, 1)");
    check(c.train_fraction > 0.0 && c.train_fraction < 1.0,
          "train_fraction must lie in (0, 1)");
    check(!c.out_dir.empty(), "out_dir must not be empty");

    if (check_input_paths) {
        auto check_path = [&](const std::string& path, const std::string& what) {
            if (path.empty()) problems.push_back(what + " is not set");
            else if (!fs::exists(path)) problems.push_back(what + " '" + path + "' does not exist");
        };
        check_path(c.comments_path, "comments_path");
        check_path(c.market_path, "market_path");
        check_path(c.stemmer_dict_path, "stemmer_dict_path");
        check_path(c.stopwords_path, "stopwords_path");
    }
    return problems;
}

std::string canonical_config(const PipelineConfig& c) {
    std::map<std::string, std::string> kv;
    kv["comments_path"] = c.comments_path;
    kv["market_path"] = c.market_path;
    kv["comments_format"] = c.comments_format;
    kv["stock_symbol"] = c.stock_symbol;
    kv["stemmer_dict_path"] = c.stemmer_dict_path;
    kv["stopwords_path"] = c.stopwords_path;
    kv["out_dir"] = c.out_dir;
    kv["df_threshold"] = std::to_string(c.df_threshold);
    kv["smoothing"] = format_double(c.smoothing);
    kv["algorithm"] = c.algorithm;
    kv["bagging_size"] = std::to_string(c.bagging_size);
    kv["pruning_confidence"] = format_double(c.pruning_confidence);
    kv["max_depth"] = std::to_string(c.max_depth);
    kv["min_leaf"] = std::to_string(c.min_leaf);
    kv["folds"] = std::to_string(c.folds);
    kv["include_score"] = c.include_score ? "true" : "false";
    kv["cutoff"] = c.cutoff;
    kv["input_utc_offset_minutes"] = std::to_string(c.input_utc_offset_minutes);
    kv["trust_window_start"] = c.trust_window_start;
    kv["trust_window_end"] = c.trust_window_end;
    kv["default_tc"] = format_double(c.default_tc);
    kv["missing_policy"] = c.missing_policy;
    kv["max_lag"] = std::to_string(c.max_lag);
    kv["alpha"] = format_double(c.alpha);
    kv["train_fraction"] = format_double(c.train_fraction);
    kv["seed"] = std::to_string(c.seed);

    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string config_hash(const PipelineConfig& c) {
    // FNV-1a 64-bit over the canonical serialization.
    const std::string s = canonical_config(c);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- stage dispatch ----

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::ingest: return "ingest";
        case Stage::preprocess: return "preprocess";
        case Stage::build_lexicon: return "build-lexicon";
        case Stage::train: return "train";
        case Stage::classify: return "classify";
        case Stage::trust: return "trust";
        case Stage::indices: return "indices";
        case Stage::analyze: return "analyze";
        case Stage::fit: return "fit";
        case Stage::evaluate: return "evaluate";
        case Stage::report: return "report";
    }
    throw std::runtime_error("invalid stage value");
}

Stage stage_from_string(const std::string& s) {
    for (Stage stage : all_stages())
        if (to_string(stage) == s) return stage;
    throw std::runtime_error("unknown stage '" + s + "'");
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages = {
        Stage::ingest,  Stage::preprocess, Stage::build_lexicon, Stage::train,
        Stage::classify, Stage::trust,     Stage::indices,       Stage::analyze,
        Stage::fit,     Stage::evaluate,   Stage::report,
    };
    return stages;
}

std::vector<std::string> stage_inputs(Stage stage, const PipelineConfig& c) {
    const Artifacts a(c);
    switch (stage) {
        case Stage::ingest: return {c.comments_path, c.market_path};
        case Stage::preprocess: return {a.corpus, c.stemmer_dict_path, c.stopwords_path};
        case Stage::build_lexicon: return {a.tokens};
        case Stage::train: return {a.tokens, a.lexicon};
        case Stage::classify: return {a.tokens, a.lexicon};
        case Stage::trust: return {a.corpus, a.market, a.classified};
        case Stage::indices: return {a.corpus, a.market, a.classified, a.trust};
        case Stage::analyze: return {a.indicators, a.market};
        case Stage::fit: return {a.indicators, a.market};
        case Stage::evaluate: {
            std::vector<std::string> in = {a.indicators, a.market};
            for (const std::string& t : kTargets) {
                in.push_back(a.m0(t));
                in.push_back(a.m1(t));
            }
            return in;
        }
        case Stage::report: return {a.evaluation};
    }
    return {};
}

std::vector<std::string> stage_outputs(Stage stage, const PipelineConfig& c) {
    const Artifacts a(c);
    switch (stage) {
        case Stage::ingest: return {a.corpus, a.market, a.buckets};
        case Stage::preprocess: return {a.tokens};
        case Stage::build_lexicon: return {a.lexicon};
        case Stage::train: return {a.model, a.cv_metrics};
        case Stage::classify: return {a.classified};
        case Stage::trust: return {a.trust};
        case Stage::indices: return {a.indicators};
        case Stage::analyze: return {a.analysis_dir + "/"};
        case Stage::fit: {
            std::vector<std::string> out;
            for (const std::string& t : kTargets) {
                out.push_back(a.m0(t));
                out.push_back(a.m1(t));
            }
            return out;
        }
        case Stage::evaluate: return {a.evaluation};
        case Stage::report: return {a.report_csv, a.report_json};
    }
    return {};
}

void run_stage(Stage stage, const PipelineConfig& config) {
    const auto problems = validate_config(config, stage == Stage::ingest);
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        throw std::runtime_error(msg);
    }
    if (stage == Stage::preprocess) {
        // The dictionary and stopword paths are first consumed here.
        std::vector<std::string> missing;
        for (const std::string& p : {config.stemmer_dict_path, config.stopwords_path})
            if (p.empty() || !fs::exists(p))
                missing.push_back(p.empty() ? "(unset path)" : p);
        if (!missing.empty()) {
            std::string msg = "invalid configuration:";
            for (const std::string& p : missing)
                msg += "\n  - required file '" + p + "' does not exist";
            throw std::runtime_error(msg);
        }
    }
    fs::create_directories(config.out_dir);
    const Artifacts a(config);
    require_artifacts(stage_inputs(stage, config), a);

    switch (stage) {
        case Stage::ingest: stage_ingest(config); break;
        case Stage::preprocess: stage_preprocess(config); break;
        case Stage::build_lexicon: stage_build_lexicon(config); break;
        case Stage::train: stage_train(config); break;
        case Stage::classify: stage_classify(config); break;
        case Stage::trust: stage_trust(config); break;
        case Stage::indices: stage_indices(config); break;
        case Stage::analyze: stage_analyze(config); break;
        case Stage::fit: stage_fit(config); break;
        case Stage::evaluate: stage_evaluate(config); break;
        case Stage::report: stage_report(config); break;
    }
}

}  // namespace sentipred
