#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "dgnn/bounded_queue.hpp"
#include "dgnn/ping_pong.hpp"
#include "dgnn/preprocess.hpp"

using namespace dgnn;

namespace {

// 3-node path 10 -> 20 -> 30 built through the preprocess pipeline.
Snapshot path_snapshot() {
    TemporalEdgeList edges({{10, 20, 1.0f, 0}, {20, 30, 2.0f, 1}});
    auto snaps = preprocess(edges, {100, true}, SeededFeatures(4, 1));
    REQUIRE(snaps.size() == 1);
    return snaps[0];
}

} // namespace

TEST_CASE("empty graph is valid") {
    Snapshot s;
    CHECK(validate_snapshot(s).ok());
}

TEST_CASE("path graph from preprocess is valid") {
    auto s = path_snapshot();
    CHECK(s.n_nodes() == 3);
    CHECK(s.n_edges() == 2);
    CHECK(validate_snapshot(s).ok());
    CHECK_NOTHROW(ensure_valid(s));
}

TEST_CASE("row_ptr violations") {
    SUBCASE("decreasing") {
        Snapshot s;
        s.csr.n_nodes = 2;
        s.csr.row_ptr = {0, 2, 1};
        s.csr.col_idx = {0};
        s.csr.edge_weight = {1.0f};
        CHECK(validate_snapshot(s).code == ErrorCode::RowPtrNotMonotone);
    }
    SUBCASE("does not start at zero") {
        auto s = path_snapshot();
        s.csr.row_ptr[0] = 1;
        CHECK(validate_snapshot(s).code == ErrorCode::RowPtrNotMonotone);
    }
    SUBCASE("last entry disagrees with edge count") {
        auto s = path_snapshot();
        s.csr.col_idx.push_back(0);
        s.csr.edge_weight.push_back(1.0f);
        CHECK(validate_snapshot(s).code == ErrorCode::RowPtrNotMonotone);
    }
}

TEST_CASE("column index violations") {
    auto s = path_snapshot();
    SUBCASE("out of range") {
        s.csr.col_idx[0] = 3;
        CHECK(validate_snapshot(s).code == ErrorCode::ColIdxOutOfRange);
    }
    SUBCASE("duplicate column in a row") {
        Snapshot t = path_snapshot();
        t.csr.row_ptr = {0, 0, 2, 2};
        t.csr.col_idx = {0, 0};
        CHECK(validate_snapshot(t).code == ErrorCode::ColIdxNotAscending);
    }
}

TEST_CASE("renumber table violations") {
    auto s = path_snapshot();
    SUBCASE("not ascending") {
        std::swap(s.renumber.local_to_raw[0], s.renumber.local_to_raw[1]);
        CHECK(validate_snapshot(s).code == ErrorCode::RenumberNotBijective);
    }
    SUBCASE("inverse map disagrees") {
        s.renumber.raw_to_local[20] = 0;
        CHECK(validate_snapshot(s).code == ErrorCode::RenumberNotBijective);
    }
    SUBCASE("size mismatch") {
        s.renumber.local_to_raw.push_back(40);
        CHECK(validate_snapshot(s).code == ErrorCode::RenumberNotBijective);
    }
}

TEST_CASE("embedding violations") {
    auto s = path_snapshot();
    SUBCASE("row count") {
        s.node_embed = Matrix(2, 4);
        CHECK(validate_snapshot(s).code == ErrorCode::EmbedShapeMismatch);
    }
    SUBCASE("NaN feature") {
        s.node_embed(1, 2) = std::numeric_limits<float>::quiet_NaN();
        CHECK(validate_snapshot(s).code == ErrorCode::NonFiniteValue);
    }
    SUBCASE("infinite edge weight") {
        s.csr.edge_weight[0] = std::numeric_limits<float>::infinity();
        CHECK(validate_snapshot(s).code == ErrorCode::NonFiniteValue);
    }
}

TEST_CASE("first violated invariant is reported") {
    auto s = path_snapshot();
    s.node_embed = Matrix(1, 4);  // later check
    s.csr.col_idx[0] = 99;        // earlier check
    auto r = validate_snapshot(s);
    CHECK(r.code == ErrorCode::ColIdxOutOfRange);
    CHECK_FALSE(r.detail.empty());
    try {
        ensure_valid(s);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ColIdxOutOfRange);
    }
}

TEST_CASE("temporal edge list invariants") {
    TemporalEdgeList l({{1, 2, 1.0f, 50}, {2, 3, 1.0f, 7}, {3, 1, 1.0f, 90}});
    CHECK(l.t_min() == 7);
    CHECK(l.t_max() == 90);
    CHECK(l.edges()[0].time == 50);  // order preserved

    CHECK_THROWS_AS(TemporalEdgeList({{1, 2, std::nanf(""), 0}}), Error);
    try {
        TemporalEdgeList({{1, 2, 1.0f, -1}});
        FAIL("negative time accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}

TEST_CASE("bitwise equality compares bytes") {
    Matrix a(1, 2), b(1, 2);
    CHECK(bitwise_equal(a, b));
    b(0, 1) = -0.0f;
    CHECK_FALSE(bitwise_equal(a, b));
    CHECK_FALSE(bitwise_equal(Matrix(2, 1), Matrix(1, 2)));
}

TEST_CASE("weight set access") {
    WeightSet w;
    w.insert_matrix("a", Matrix(2, 3, 1.0f));
    w.insert_vector("b", std::vector<float>{1, 2, 3});
    CHECK(w.size() == 2);
    CHECK(w.matrix("a", 2, 3)(1, 2) == 1.0f);

    auto code_of = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Ok;
    };
    CHECK(code_of([&] { w.matrix("a", 3, 2); }) == ErrorCode::ShapeMismatch);
    CHECK(code_of([&] { w.at("missing"); }) == ErrorCode::MissingTensor);
    CHECK(code_of([&] { w.insert_vector("b", std::vector<float>{1}); }) == ErrorCode::DuplicateTensor);
    CHECK(code_of([&] { w.insert("c", Tensor{{2, 2}, {1, 2, 3}}); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("node state store") {
    NodeStateStore st;
    CHECK(st.find(5) == nullptr);
    st.put(9, {{1.0f}, {}});
    st.put(2, {{2.0f}, {}});
    st.put(9, {{3.0f}, {}});
    CHECK(st.size() == 2);
    auto s = st.sorted();
    CHECK(s[0].first == 2);
    CHECK(s[1].second->h[0] == 3.0f);
}

TEST_CASE("bounded queue is FIFO and drains after close") {
    BoundedQueue<int> q(4);
    for (int i = 0; i < 4; ++i)
        CHECK(q.push(i));
    q.close();
    CHECK_FALSE(q.push(99));
    for (int i = 0; i < 4; ++i)
        CHECK(q.pop() == i);
    CHECK_FALSE(q.pop().has_value());
    CHECK(q.pushed() == 4);
}

TEST_CASE("bounded queue applies backpressure at capacity 1") {
    BoundedQueue<int> q(1);
    constexpr int n = 2000;
    std::thread producer([&] {
        for (int i = 0; i < n; ++i)
            q.push(i);
        q.close();
    });
    int expect = 0;
    while (auto v = q.pop()) {
        CHECK(*v == expect);
        ++expect;
    }
    producer.join();
    CHECK(expect == n);
}

TEST_CASE("ping-pong pair alternates halves") {
    PingPongPair<int> p(0);
    p.write() = 1;
    CHECK(p.read() == 0);
    p.flip();
    CHECK(p.read() == 1);
    p.write() = 2;
    p.flip();
    CHECK(p.read() == 2);
    CHECK(p.violations() == 0);
}

TEST_CASE("ping-pong pair detects read and write of one half") {
    PingPongPair<int> p(0);
    (void)p.read();
    p.writer(p.front_index()) = 5;
    CHECK(p.violations() == 1);
    p.flip();
    (void)p.read();
    (void)p.read();
    CHECK(p.violations() == 1);
}
