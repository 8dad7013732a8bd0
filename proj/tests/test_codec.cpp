#include <doctest.h>

#include "glidebench/checksum.hpp"
#include "glidebench/codec.hpp"
#include "glidebench/errors.hpp"
#include "helpers.hpp"

using namespace glidebench;

TEST_SUITE("codec") {
  TEST_CASE("sha256 matches an independent implementation") {
    // Digests computed with Python hashlib.
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("Intel(R) Xeon(R) \xc3\xa9") ==
          "fcc47bf03049643cf5a957272632144b6921b7bb1fdf9814df8d757034ee19aa");
  }

  TEST_CASE("result payload has fixed key order on one line") {
    const std::string line = result_payload_line(testing::sample_result());
    CHECK(line ==
          R"({"schema_version":1,"pilot_id":"p-00000001","entry_id":"e1","spec_id":"s1","score":50.0,)"
          R"("duration_s":20.0,"started_at":0.0,"node":{"cores":1,"memory_mb":1,"disk_mb":0,"gpus":0,)"
          R"("cpu_model":"unknown"},"exit_code":0})");
    CHECK(result_from_json(parse_json_text(line)) == testing::sample_result());
  }

  TEST_CASE("doubles round-trip through text") {
    for (double v : {0.1, 1.0 / 3.0, 3.3333333333333335, 1e-300, 123456789.125}) {
      CHECK(parse_json_text(format_number(v)).get<double>() == v);
      CHECK(parse_json_text(result_payload_line(testing::sample_result("p", v)))["score"].get<double>() == v);
    }
  }

  TEST_CASE("parse errors carry a position") {
    try {
      parse_json_text("{\n  \"a\": [1, 2,\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() >= 2);
    }
  }

  TEST_CASE("strict reader rejects unknown keys") {
    CHECK_THROWS_AS(node_from_json(parse_json_text(R"({"cores":2,"colour":"red"})")), ParseError);
    CHECK_THROWS_AS(node_from_json(parse_json_text(R"({"cores":"two"})")), ParseError);
  }
}
