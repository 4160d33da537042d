#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/judge.hpp"
#include "ladder/parse.hpp"
#include "ladder/policy.hpp"
#include "ladder/rng.hpp"
#include "ladder/self_improve.hpp"
#include "ladder/task.hpp"

using namespace ladder;

namespace {

TokenSequence toks(const std::string& text) {
    TokenSequence out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(vocab().id(tok));
    return out;
}

TaskInstance binary_yes_task(const std::string& id = "t-bin") {
    TaskInstance t;
    t.id = id;
    t.stage = StageId::binary_decision;
    t.kind = TaskKind::detection;
    t.prompt_tokens = toks("is there a red circle ? answer :");
    t.answer = AnswerSpec{BinaryAnswer{true}};
    return t;
}

TaskInstance text_math_task(const std::string& id = "t-math") {
    TaskInstance t;
    t.id = id;
    t.stage = StageId::open_ended;
    t.kind = TaskKind::math;
    t.prompt_tokens = toks("what is 3 + 4 ? answer :");
    t.answer = AnswerSpec{NumericAnswer{Rational(7)}};
    return t;
}

CandidateSample candidate_for(const TaskInstance& task, const std::string& response_text,
                              int index = 0) {
    CandidateSample c;
    c.candidate_id = task.id + "#k" + std::to_string(index);
    c.task_id = task.id;
    c.prompt = task.prompt_tokens;
    c.response = toks(response_text);
    return c;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("oracle judge composes accuracy, format, and reasoning credit") {
    const OracleJudge judge;
    const TaskInstance task = binary_yes_task();

    auto score_of = [&](const std::string& text) {
        return judge.score(candidate_for(task, text), task);
    };
    // Correct, well-formed, with substantive reasoning.
    CHECK(score_of("<think> there is a red circle </think> <answer> yes </answer>") == 100.0);
    // Correct without a think block: no reasoning credit.
    CHECK(score_of("<answer> yes </answer>") == 90.0);
    // Whitespace-only reasoning earns nothing.
    CHECK(score_of("<think> </think> <answer> yes </answer>") == 90.0);
    // Wrong but well-formed keeps format and reasoning credit.
    CHECK(score_of("<think> no </think> <answer> no </answer>") == 30.0);
    CHECK(score_of("<answer> no </answer>") == 20.0);
    // Grammar violations score zero across the board.
    CHECK(score_of("yes") == 0.0);
    CHECK(score_of("<answer> yes") == 0.0);
    CHECK(score_of("") == 0.0);
}

TEST_CASE("oracle judge passes partial accuracy through the 70-point slice") {
    const OracleJudge judge;
    TaskInstance t;
    t.id = "t-multi";
    t.stage = StageId::multiple_choice;
    t.kind = TaskKind::classification;
    t.prompt_tokens = toks("which categories appear ? answer :");
    t.option_texts = {"red circle", "blue square", "green triangle", "yellow diamond"};
    t.answer = AnswerSpec{MultiChoiceAnswer{{'A', 'C'}}};

    CHECK(judge.score(candidate_for(t, "<answer> A , C </answer>"), t) == 90.0);
    // Proper subset of the correct set: 0.2 accuracy.
    CHECK(judge.score(candidate_for(t, "<answer> A </answer>"), t) ==
          doctest::Approx(70.0 * 0.2 + 20.0));
    CHECK(judge.score(candidate_for(t, "<answer> B </answer>"), t) == 20.0);
}

TEST_CASE("domain tags name round-trip and map from tasks") {
    for (DomainTag tag : {DomainTag::math_text, DomainTag::science, DomainTag::multimodal_math,
                          DomainTag::general}) {
        CHECK(domain_tag_from_name(domain_tag_name(tag)) == tag);
    }
    CHECK_THROWS_AS(domain_tag_from_name("maths"), std::invalid_argument);

    CHECK(domain_for_task(text_math_task()) == DomainTag::math_text);

    TaskInstance counting = text_math_task("t-count");
    counting.scene.objects.push_back(SceneObject{"circle", "red", BoundingBox{1, 1, 2, 2}});
    CHECK(domain_for_task(counting) == DomainTag::multimodal_math);

    CHECK(domain_for_task(binary_yes_task()) == DomainTag::general);
}

TEST_CASE("sample_candidates ids follow task order and sampling is seeded") {
    const PolicyConfig cfg = PolicyConfig::for_vocab();
    auto init_rng = make_rng(11, "si-test", 0);
    const PolicyParams params = PolicyParams::random_init(cfg, 0.3, init_rng);
    const std::vector<TaskInstance> tasks{binary_yes_task("a"), text_math_task("b")};

    auto rng1 = make_rng(11, "si-test", 1);
    const auto cands = sample_candidates(params, tasks, 3, 1.0, rng1);
    REQUIRE(cands.size() == 6);
    const std::vector<std::string> want_ids{"a#k0", "a#k1", "a#k2", "b#k0", "b#k1", "b#k2"};
    for (std::size_t i = 0; i < cands.size(); ++i) {
        CHECK(cands[i].candidate_id == want_ids[i]);
        CHECK(cands[i].task_id == (i < 3 ? "a" : "b"));
        CHECK(cands[i].prompt == tasks[i / 3].prompt_tokens);
        CHECK_FALSE(cands[i].judge_score.has_value());
    }

    auto rng2 = make_rng(11, "si-test", 1);
    const auto again = sample_candidates(params, tasks, 3, 1.0, rng2);
    for (std::size_t i = 0; i < cands.size(); ++i) CHECK(again[i].response == cands[i].response);

    auto rng3 = make_rng(11, "si-test", 2);
    CHECK_THROWS_AS(sample_candidates(params, tasks, 0, 1.0, rng3), std::invalid_argument);
}

TEST_CASE("judge_candidates fills every score and validates task references") {
    const OracleJudge judge;
    const TaskInstance task = binary_yes_task();
    std::vector<CandidateSample> cands{candidate_for(task, "<answer> yes </answer>", 0),
                                       candidate_for(task, "yes yes yes", 1)};
    judge_candidates(cands, {task}, judge);
    CHECK(cands[0].judge_score == 90.0);
    CHECK(cands[1].judge_score == 0.0);

    std::vector<CandidateSample> stray{candidate_for(task, "<answer> yes </answer>")};
    stray[0].task_id = "missing";
    CHECK_THROWS_AS(judge_candidates(stray, {task}, judge), std::invalid_argument);

    std::vector<TaskInstance> dup{task, task};
    std::vector<CandidateSample> one{candidate_for(task, "<answer> yes </answer>")};
    CHECK_THROWS_AS(judge_candidates(one, dup, judge), std::invalid_argument);
}

TEST_CASE("judge_candidates rejects scores outside the 0-100 scale") {
    struct WildJudge : Judge {
        std::string name() const override { return "wild"; }
        double score(const CandidateSample&, const TaskInstance&) const override { return 101.0; }
    };
    const TaskInstance task = binary_yes_task();
    std::vector<CandidateSample> cands{candidate_for(task, "<answer> yes </answer>")};
    CHECK_THROWS_AS(judge_candidates(cands, {task}, WildJudge{}), std::runtime_error);
}

TEST_CASE("filter_accepted keeps the threshold boundary and deduplicates") {
    const TaskInstance task = binary_yes_task();
    auto judged = [&](const std::string& text, int index, double score) {
        CandidateSample c = candidate_for(task, text, index);
        c.judge_score = score;
        return c;
    };
    const std::vector<CandidateSample> cands{
        judged("<answer> yes </answer>", 0, 90.0),
        judged("<answer> yes </answer>", 1, 95.0),  // duplicate (prompt, response)
        judged("<answer> no </answer>", 2, 85.0),   // exactly at threshold
        judged("yes", 3, 84.999),                   // below threshold
    };
    const CuratedDataset dataset = filter_accepted(cands, {task}, 85.0, "oracle", 7);
    REQUIRE(dataset.samples.size() == 2);
    CHECK(dataset.samples[0].candidate.candidate_id == "t-bin#k0");  // first occurrence wins
    CHECK(dataset.samples[1].candidate.candidate_id == "t-bin#k2");
    CHECK(dataset.judge_name == "oracle");
    CHECK(dataset.threshold == 85.0);
    CHECK(dataset.seed == 7);
    CHECK(dataset.samples[0].domain == DomainTag::general);

    // Raising the threshold can only shrink the set of accepted
    // (prompt, response) pairs; the surviving candidate id may shift when a
    // duplicate below the new threshold used to win the first-seen slot.
    const auto strict = filter_accepted(cands, {task}, 95.0, "oracle", 7);
    CHECK(strict.samples.size() <= dataset.samples.size());
    for (const auto& s : strict.samples) {
        bool found = false;
        for (const auto& base : dataset.samples)
            found = found || (base.candidate.prompt == s.candidate.prompt &&
                              base.candidate.response == s.candidate.response);
        CHECK(found);
    }

    std::vector<CandidateSample> unjudged{candidate_for(task, "<answer> yes </answer>")};
    CHECK_THROWS_AS(filter_accepted(unjudged, {task}, 85.0, "oracle", 0),
                    std::invalid_argument);
}

TEST_CASE("curated samples and provenance serialize faithfully") {
    const TaskInstance task = text_math_task();
    CuratedSample sample;
    sample.candidate = candidate_for(task, "<think> 3 + 4 = 7 </think> <answer> 7 </answer>");
    sample.candidate.judge_score = 100.0;
    sample.domain = DomainTag::math_text;

    const nlohmann::json j = curated_sample_to_json(sample);
    CHECK(j.at("response_text").get<std::string>() ==
          vocab().detokenize(sample.candidate.response));
    const CuratedSample back = curated_sample_from_json(j);
    CHECK(back.candidate.candidate_id == sample.candidate.candidate_id);
    CHECK(back.candidate.task_id == sample.candidate.task_id);
    CHECK(back.candidate.prompt == sample.candidate.prompt);
    CHECK(back.candidate.response == sample.candidate.response);
    CHECK(back.candidate.judge_score == sample.candidate.judge_score);
    CHECK(back.domain == sample.domain);

    CuratedDataset dataset;
    dataset.samples = {sample, sample};
    dataset.samples[1].domain = DomainTag::general;
    dataset.judge_name = "oracle";
    dataset.threshold = 85.0;
    dataset.seed = 42;
    const nlohmann::json prov = provenance_json(dataset);
    CHECK(prov.at("judge") == "oracle");
    CHECK(prov.at("threshold") == 85.0);
    CHECK(prov.at("seed") == 42);
    CHECK(prov.at("sample_count") == 2);
    CHECK(prov.at("samples_by_domain").at("math-text") == 1);
    CHECK(prov.at("samples_by_domain").at("general") == 1);
}

TEST_CASE("sft loss rejects degenerate inputs and descends under small steps") {
    const PolicyConfig cfg = PolicyConfig::for_vocab();
    auto rng = make_rng(5, "si-test", 3);
    PolicyParams params = PolicyParams::random_init(cfg, 0.3, rng);

    CHECK_THROWS_AS(sft_loss(params, {}), std::invalid_argument);
    CHECK_THROWS_AS(sft_loss(params, {SftExample{toks("answer :"), {}}}),
                    std::invalid_argument);

    const std::vector<SftExample> batch{
        SftExample{toks("is there a red circle ? answer :"), toks("<answer> yes </answer>")},
        SftExample{toks("what is 3 + 4 ? answer :"), toks("<answer> 7 </answer>")},
    };
    const double before = sft_loss(params, batch).loss;
    double prev = before;
    for (int step = 0; step < 40; ++step) {
        const double pre = sft_step(params, batch, 0.02);
        // sft_step reports the loss at the point it stepped from.
        if (step == 0) CHECK(pre == doctest::Approx(before).epsilon(1e-12));
        CHECK(pre <= prev + 1e-12);
        prev = pre;
    }
    CHECK(sft_loss(params, batch).loss < before);
}

TEST_CASE("self_improve is a flagged no-op when nothing clears the judge") {
    const PolicyConfig cfg = PolicyConfig::for_vocab();
    auto init_rng = make_rng(9, "si-test", 4);
    PolicyParams params = PolicyParams::random_init(cfg, 0.3, init_rng);
    const std::vector<double> theta_before = params.theta;

    SelfImproveConfig si;
    si.candidates_per_task = 2;
    si.judge_threshold = 100.5;  // above the lattice maximum
    si.sft_steps = 10;
    const OracleJudge judge;
    auto rng = make_rng(9, "si-test", 5);
    CuratedDataset dataset;
    const SelfImproveReport report =
        self_improve(params, {binary_yes_task(), text_math_task()}, si, judge, rng, &dataset);

    CHECK(report.no_accepted);
    CHECK(report.candidate_count == 4);
    CHECK(report.accepted_count == 0);
    CHECK(report.acceptance_rate == 0.0);
    CHECK(report.loss_curve.empty());
    CHECK(dataset.samples.empty());
    CHECK(params.theta == theta_before);

    auto rng2 = make_rng(9, "si-test", 6);
    CHECK_THROWS_AS(self_improve(params, {}, si, judge, rng2), std::invalid_argument);
}

TEST_CASE("self_improve trains on accepted responses and reports the curve") {
    const PolicyConfig cfg = PolicyConfig::for_vocab();
    auto init_rng = make_rng(13, "si-test", 7);
    PolicyParams params = PolicyParams::random_init(cfg, 0.3, init_rng);
    const std::vector<double> theta_before = params.theta;

    SelfImproveConfig si;
    si.candidates_per_task = 4;
    si.judge_threshold = 0.0;  // accept everything; dedup still applies
    si.sft_steps = 8;
    si.learning_rate = 1e-3;
    const OracleJudge judge;
    auto rng = make_rng(13, "si-test", 8);
    CuratedDataset dataset;
    const SelfImproveReport report =
        self_improve(params, {binary_yes_task(), text_math_task()}, si, judge, rng, &dataset);

    CHECK_FALSE(report.no_accepted);
    CHECK(report.candidate_count == 8);
    CHECK(report.accepted_count == dataset.samples.size());
    CHECK(report.accepted_count >= 1);
    CHECK(report.accepted_count <= 8);
    CHECK(report.acceptance_rate ==
          doctest::Approx(static_cast<double>(report.accepted_count) / 8.0));
    CHECK(report.loss_curve.size() == 8);
    CHECK(params.theta != theta_before);
    std::set<std::string> ids;
    for (const auto& s : dataset.samples) {
        CHECK(s.candidate.judge_score.has_value());
        CHECK(ids.insert(s.candidate.candidate_id).second);
    }
}

TEST_CASE("file judge parses scores and rejects malformed tables") {
    const TaskInstance task = binary_yes_task();
    const CandidateSample c0 = candidate_for(task, "<answer> yes </answer>", 0);
    const CandidateSample c1 = candidate_for(task, "<answer> no </answer>", 1);

    const auto path = temp_file("ladder-judge-ok.txt",
                                "t-bin#k0 91.5\n\nt-bin#k1\t17\r\n  # not a comment id 3 \n");
    // The third line is an id ending in "3": ids may contain spaces, the
    // score is whatever follows the last separator.
    const FileJudge judge(path);
    CHECK(judge.entry_count() == 3);
    CHECK(judge.name() == std::string("file:") + path.string());
    CHECK(judge.score(c0, task) == 91.5);
    CHECK(judge.score(c1, task) == 17.0);

    CandidateSample unknown = c0;
    unknown.candidate_id = "absent#k0";
    CHECK_THROWS_AS(judge.score(unknown, task), std::runtime_error);

    CHECK_THROWS_AS(FileJudge(temp_file("ladder-judge-badscore.txt", "t-bin#k0 high\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(FileJudge(temp_file("ladder-judge-range.txt", "t-bin#k0 150\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(FileJudge(temp_file("ladder-judge-neg.txt", "t-bin#k0 -3\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(
        FileJudge(temp_file("ladder-judge-dup.txt", "t-bin#k0 10\nt-bin#k0 20\n")),
        std::runtime_error);
    CHECK_THROWS_AS(FileJudge(temp_file("ladder-judge-noscore.txt", "loneid\n")),
                    std::runtime_error);
    CHECK_THROWS_AS(FileJudge(std::filesystem::temp_directory_path() / "ladder-no-such-file"),
                    std::runtime_error);

    for (const char* name :
         {"ladder-judge-ok.txt", "ladder-judge-badscore.txt", "ladder-judge-range.txt",
          "ladder-judge-neg.txt", "ladder-judge-dup.txt", "ladder-judge-noscore.txt"}) {
        std::filesystem::remove(std::filesystem::temp_directory_path() / name);
    }
}
