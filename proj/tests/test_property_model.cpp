#include <doctest.h>

#include <qclkg/errors.hpp>
#include <qclkg/properties.hpp>

using namespace qclkg;

TEST_SUITE("property_model") {

TEST_CASE("units and kinds round-trip through their symbols") {
  CHECK(unit_symbol(Unit::Kelvin) == "K");
  CHECK(unit_symbol(Unit::MilliWatt) == "mW");
  CHECK(unit_symbol(Unit::Watt) == "W");
  CHECK(unit_symbol(Unit::TeraHertz) == "THz");
  CHECK(unit_symbol(Unit::GigaHertz) == "GHz");
  for (Unit u : {Unit::Kelvin, Unit::MilliWatt, Unit::Watt, Unit::TeraHertz, Unit::GigaHertz}) {
    CHECK(unit_from_symbol(unit_symbol(u)) == u);
  }
  CHECK_FALSE(unit_from_symbol("mw").has_value());  // case-sensitive
  CHECK_FALSE(unit_from_symbol("Hz").has_value());
  CHECK(kind_of_unit(Unit::Watt) == QuantityKind::Power);
  CHECK(kind_of_unit(Unit::GigaHertz) == QuantityKind::Frequency);
  CHECK(quantity_kind_from_string("Temperature") == QuantityKind::Temperature);
  CHECK_FALSE(quantity_kind_from_string("Speed").has_value());
}

TEST_CASE("parse_quantity reads value-unit pairs out of free text") {
  const Quantity t = parse_quantity("operated up to 150 K", QuantityKind::Temperature);
  CHECK(t.value == 150.0);
  CHECK(t.unit == Unit::Kelvin);
  CHECK(t.raw == "operated up to 150 K");

  const Quantity w = parse_quantity("1.1 W", QuantityKind::Power);
  CHECK(w.value == 1.1);
  CHECK(w.unit == Unit::Watt);

  const Quantity g = parse_quantity("emission at 890 GHz", QuantityKind::Frequency);
  CHECK(g.value == 890.0);
  CHECK(g.unit == Unit::GigaHertz);
}

TEST_CASE("parse_quantity takes the maximum when several values share the unit") {
  const Quantity f = parse_quantity("tunable from 2.1 to 2.7 THz", QuantityKind::Frequency);
  CHECK(f.value == 2.7);
  CHECK(f.unit == Unit::TeraHertz);
}

TEST_CASE("parse_quantity failure modes") {
  CHECK_THROWS_AS(parse_quantity("no numbers here", QuantityKind::Power), UnparsableQuantity);
  CHECK_THROWS_AS(parse_quantity("150 Kelvin", QuantityKind::Temperature), UnparsableQuantity);
  CHECK_THROWS_AS(parse_quantity("150 K", QuantityKind::Power), KindMismatch);
  CHECK_THROWS_AS(parse_quantity("0 THz", QuantityKind::Frequency), InvalidQuantity);
}

TEST_CASE("make_quantity validates ranges and kind agreement") {
  CHECK_NOTHROW(make_quantity(0.0, Unit::Kelvin, QuantityKind::Temperature));
  CHECK_THROWS_AS(make_quantity(-1.0, Unit::Kelvin, QuantityKind::Temperature), InvalidQuantity);
  CHECK_THROWS_AS(make_quantity(-1.0, Unit::MilliWatt, QuantityKind::Power), InvalidQuantity);
  CHECK_THROWS_AS(make_quantity(0.0, Unit::TeraHertz, QuantityKind::Frequency), InvalidQuantity);
  CHECK_THROWS_AS(make_quantity(5.0, Unit::Watt, QuantityKind::Temperature), KindMismatch);
}

TEST_CASE("to_base_value converts to K, mW, THz") {
  CHECK(to_base_value(make_quantity(150, Unit::Kelvin, QuantityKind::Temperature)) == 150.0);
  CHECK(to_base_value(make_quantity(1.1, Unit::Watt, QuantityKind::Power)) == doctest::Approx(1100.0));
  CHECK(to_base_value(make_quantity(890, Unit::GigaHertz, QuantityKind::Frequency)) ==
        doctest::Approx(0.89));
  CHECK(to_base_value(make_quantity(3.4, Unit::TeraHertz, QuantityKind::Frequency)) == 3.4);
}

TEST_CASE("render_double emits the shortest round-trippable form") {
  CHECK(render_double(4.0) == "4");
  CHECK(render_double(0.5) == "0.5");
  CHECK(render_double(2.05) == "2.05");
  CHECK(render_double(3800.0) == "3800");
}

TEST_CASE("render_quantity round-trips through parse_quantity") {
  for (const Quantity& q : {make_quantity(4.7, Unit::TeraHertz, QuantityKind::Frequency),
                           make_quantity(0.9, Unit::MilliWatt, QuantityKind::Power),
                           make_quantity(199.5, Unit::Kelvin, QuantityKind::Temperature)}) {
    CHECK(parse_quantity(render_quantity(q), q.kind) == q);
  }
  CHECK(render_quantity(make_quantity(4.7, Unit::TeraHertz, QuantityKind::Frequency)) == "4.7 THz");
}

TEST_CASE("quantity equality ignores the raw annotation") {
  Quantity a = make_quantity(150, Unit::Kelvin, QuantityKind::Temperature, "150 K");
  Quantity b = make_quantity(150, Unit::Kelvin, QuantityKind::Temperature, "up to 150 K");
  CHECK(a == b);
  b.value = 151;
  CHECK(a != b);
}

TEST_CASE("normalize_design_label folds case, hyphens, underscores and runs of space") {
  CHECK(normalize_design_label("LO-Phonon") == "lo phonon");
  CHECK(normalize_design_label("  Bound_to_Continuum  ") == "bound to continuum");
  CHECK(normalize_design_label("resonant   phonon") == "resonant phonon");
  CHECK(normalize_design_label("") == "");
  CHECK(make_design_type("LO-phonon").label == "lo phonon");
  CHECK(make_design_type("LO-phonon").raw == "LO-phonon");
  CHECK(DesignType{"lo phonon", "LO-phonon"} == DesignType{"lo phonon", "other raw"});
}

TEST_CASE("working_mode_from_string accepts common spellings") {
  CHECK(working_mode_from_string("continuous wave") == WorkingMode::ContinuousWave);
  CHECK(working_mode_from_string("Continuous-Wave operation") == WorkingMode::ContinuousWave);
  CHECK(working_mode_from_string("CW") == WorkingMode::ContinuousWave);
  CHECK(working_mode_from_string("pulsed") == WorkingMode::Pulsed);
  CHECK(working_mode_from_string("pulse mode") == WorkingMode::Pulsed);
  CHECK_FALSE(working_mode_from_string("steady").has_value());
  // Continuous-wave wording wins even when pulse wording is also present.
  CHECK(working_mode_from_string("continuous wave and pulsed") == WorkingMode::ContinuousWave);
  CHECK(to_string(WorkingMode::ContinuousWave) == "continuous wave");
  CHECK(to_string(WorkingMode::Pulsed) == "pulsed");
}

TEST_CASE("property class names and envelope keys round-trip") {
  for (PropertyClass cls : kAllPropertyClasses) {
    CHECK(property_class_from_string(to_string(cls)) == cls);
    CHECK(property_class_from_envelope_key(envelope_key(cls)) == cls);
  }
  CHECK(to_string(PropertyClass::DesignType) == "DesignType");
  CHECK(envelope_key(PropertyClass::DesignType) == "design_type");
  CHECK_FALSE(property_class_from_string("Wavelength").has_value());
  CHECK_FALSE(property_class_from_envelope_key("wavelength").has_value());
}

TEST_CASE("has_any_property requires more than a working mode") {
  QclDeviceRecord r;
  r.device_id = "x";
  CHECK_FALSE(has_any_property(r));
  r.working_mode = WorkingMode::Pulsed;
  CHECK_FALSE(has_any_property(r));
  r.heterostructure = Heterostructure{"GaAs/AlGaAs", std::nullopt};
  CHECK(has_any_property(r));
  r.heterostructure.reset();
  r.frequency = make_quantity(2.5, Unit::TeraHertz, QuantityKind::Frequency);
  CHECK(has_any_property(r));
}

TEST_CASE("is_valid_doi") {
  CHECK(is_valid_doi("10.5555/qcl.d001"));
  CHECK(is_valid_doi("10.1103/PhysRevB.1.1"));
  CHECK_FALSE(is_valid_doi("doi:10.5555/x"));
  CHECK_FALSE(is_valid_doi("11.5555/x"));
  CHECK_FALSE(is_valid_doi("10.5555/"));
  CHECK_FALSE(is_valid_doi("10./x"));
  CHECK_FALSE(is_valid_doi("10.5555/a b"));
}

TEST_CASE("validate_record accepts a fully populated record") {
  QclDeviceRecord r;
  r.device_id = "d";
  r.heterostructure = Heterostructure{"GaAs/AlGaAs", DesignType{"lo phonon", ""}};
  r.working_mode = WorkingMode::ContinuousWave;
  r.temperature = make_quantity(230, Unit::Kelvin, QuantityKind::Temperature);
  r.power = make_quantity(160, Unit::MilliWatt, QuantityKind::Power);
  r.frequency = make_quantity(3.9, Unit::TeraHertz, QuantityKind::Frequency);
  r.doi = "10.5555/qcl.d015";
  r.url = "https://doi.org/10.5555/qcl.d015";
  r.cited_dois = {"10.5555/ref.1001"};
  CHECK(validate_record(r).empty());
}

TEST_CASE("validate_record flags each broken invariant") {
  QclDeviceRecord r;
  r.device_id = "d";
  r.frequency = make_quantity(2.0, Unit::TeraHertz, QuantityKind::Frequency);

  SUBCASE("raw negative kelvin") {
    r.temperature = Quantity{-5.0, Unit::Kelvin, QuantityKind::Temperature, ""};
    const auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "temperature");
  }
  SUBCASE("formula without a slash") {
    r.heterostructure = Heterostructure{"GaAs", std::nullopt};
    const auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "heterostructure");
  }
  SUBCASE("unnormalized design label") {
    r.heterostructure = Heterostructure{"GaAs/AlGaAs", DesignType{"LO Phonon", ""}};
    const auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "design_type");
  }
  SUBCASE("malformed doi") {
    r.doi = "not-a-doi";
    const auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "doi");
  }
  SUBCASE("malformed cited doi") {
    r.cited_dois = {"10.1/ok", "junk"};
    const auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "cited_dois");
  }
  SUBCASE("empty record") {
    QclDeviceRecord empty;
    empty.device_id = "d";
    const auto v = validate_record(empty);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "record");
  }
  SUBCASE("missing device id") {
    r.device_id.clear();
    const auto v = validate_record(r);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "device_id");
  }
}

}  // TEST_SUITE
