// SPDX-License-Identifier: Apache-2.0
#include "test_support.hpp"

#include <pimc/pipeline.hpp>

#include <gtest/gtest.h>

using namespace pimc;
using namespace pimc::testing;

namespace
{

param_imc pimc_text( const std::string& text ) { return std::get< param_imc >( parse_model( text ) ); }

mc fig7()
{
    return std::get< mc >( parse_model( "mc\nstates s0 s1:alpha s2:beta s3:alpha,beta s4:alpha\ninit s0\n"
                                        "s0 -> s1 0.7\ns0 -> s2 0.3\ns1 -> s1 0.5\ns1 -> s3 0.5\n"
                                        "s2 -> s1 0.5\ns2 -> s2 0.5\ns3 -> s3 1\ns4 -> s4 1\n" ) );
}

const valuation half{ { "p", rational( 1, 2 ) }, { "q", rational( 1, 2 ) } };

verdict as_verdict( const assignment& a )
{
    verdict v;
    v.status = solver_status::sat;
    for ( const auto& [ name, x ] : a ) {
        model_value m;
        if ( std::holds_alternative< bool >( x ) ) {
            m.is_bool = true;
            m.boolean = std::get< bool >( x );
        } else {
            m.number = std::get< rational >( x );
        }
        v.model[ name ] = m;
    }
    return v;
}

solver_config configured()
{
    solver_config c;
    c.command = solver_command();
    c.timeout_seconds = 30;
    return c;
}

#define REQUIRE_SOLVER()                                                                                               \
    if ( solver_command().empty() )                                                                                    \
    GTEST_SKIP() << "PIMC_TEST_SOLVER not set"

check_report check( const param_imc& p, check_problem q )
{
    check_options opt;
    opt.solver = configured();
    return run_check( p, q, opt );
}

bool has_kind( const validation_report& r, const std::string& kind )
{
    for ( const auto& v : r.violations )
        if ( v.kind == kind )
            return true;
    return false;
}

// Random formula over x, y (reals) and b (bool) with small constants.
formula random_formula( rng& g, int depth )
{
    auto atom_term = [ & ]() -> term {
        switch ( g.below( 4 ) ) {
        case 0:
            return term::var( "x" );
        case 1:
            return term::var( "y" );
        case 2:
            return term::var( "x" ) * term::var( "y" );
        default:
            return term( make_rational( static_cast< long >( g.below( 5 ) ), 4 ) );
        }
    };
    if ( depth == 0 || g.chance( 1, 3 ) ) {
        if ( g.chance( 1, 5 ) )
            return formula::bvar( "b" );
        term a = atom_term(), b = atom_term();
        if ( g.chance( 1, 3 ) )
            a = a + atom_term();
        if ( g.chance( 1, 4 ) )
            b = term( 1 ) - b;
        return formula::compare( a, static_cast< cmp_op >( g.below( 5 ) ), b );
    }
    auto l = random_formula( g, depth - 1 ), r = random_formula( g, depth - 1 );
    switch ( g.below( 5 ) ) {
    case 0:
        return l && r;
    case 1:
        return l || r;
    case 2:
        return formula::implies( l, r );
    case 3:
        return formula::iff( l, r );
    default:
        return !l;
    }
}

} // namespace

TEST( RunCommand, TimeoutKillsTheProcess )
{
    solver_config c;
    c.command = "sleep 20; echo sat";
    c.timeout_seconds = 0.3;
    csp empty;
    auto v = run_solver( emit_smtlib( empty ), c );
    EXPECT_EQ( v.status, solver_status::timeout );
    EXPECT_LT( v.seconds, 5 );
}

TEST( RunCommand, MissingExecutable )
{
    solver_config c;
    c.command = "/nonexistent/solver-binary";
    csp empty;
    auto v = run_solver( emit_smtlib( empty ), c );
    EXPECT_EQ( v.status, solver_status::solver_error );
    EXPECT_THROW( run_solver( emit_smtlib( empty ), solver_config{} ), solver_error );
}

TEST( RunCommand, ReadsTheScriptFile )
{
    solver_config c;
    c.command = "grep -c declare-const {file} >/dev/null && echo unsat";
    csp one;
    one.declare( "x", var_sort::real );
    EXPECT_EQ( run_solver( emit_smtlib( one ), c ).status, solver_status::unsat );
}

TEST( Pipeline, InvalidModelIsRejected )
{
    // a fake solver whose model drops the initial state
    auto p = load_pimc( "fig5.pimc" );
    check_options opt;
    opt.solver.command = "cat >/dev/null <<'EOF'\nEOF\nprintf 'sat\\n((define-fun rho_0 () Bool false))\\n'";
    auto r = run_check( p, { problem_kind::consistency, {}, cmp_op::ge, 0 }, opt );
    EXPECT_EQ( r.exit, exit_invalid );
    EXPECT_FALSE( r.holds );
}

TEST( Pipeline, EmitOnlySkipsTheSolver )
{
    auto p = load_pimc( "fig5.pimc" );
    check_options opt;
    opt.emit_only = true;
    auto r = run_check( p, { problem_kind::consistency, {}, cmp_op::ge, 0 }, opt );
    EXPECT_EQ( r.exit, exit_holds );
    EXPECT_FALSE( r.result );
    EXPECT_EQ( r.variables, 17u );
    EXPECT_EQ( r.script, emit_smtlib( encode_consistency( p ).problem ).text );
}

TEST( Witness, Fig7Extraction )
{
    auto p = load_pimc( "fig5.pimc" );
    auto e = encode_quant_reach( p, { "beta" } );
    auto w = extract_witness( as_verdict( induced_assignment( e, p, half, fig7() ) ), p );
    EXPECT_EQ( w.chain.state_count(), 4u );
    EXPECT_EQ( w.origin, ( std::vector< state_index >{ 0, 1, 2, 3 } ) );
    EXPECT_EQ( w.values, half );
    ASSERT_TRUE( w.pi_initial );
    EXPECT_EQ( *w.pi_initial, R( "3/10" ) );
    auto r = validate_witness( w, p, goal::prob( { "beta" }, cmp_op::ge, R( "3/10" ) ) );
    EXPECT_TRUE( r.ok() );
    ASSERT_TRUE( r.reach );
    EXPECT_EQ( *r.reach, R( "3/10" ) );
}

TEST( Witness, ExtractionErrors )
{
    auto p = load_pimc( "fig5.pimc" );
    auto e = encode_consistency( p );
    auto a = induced_assignment( e, p, half, fig7() );

    auto no_init = a;
    no_init[ "rho_0" ] = false;
    EXPECT_THROW( extract_witness( as_verdict( no_init ), p ), error );

    auto missing = a;
    missing.erase( "theta_0_1" );
    EXPECT_THROW( extract_witness( as_verdict( missing ), p ), error );

    auto dropped = a;
    dropped[ "rho_2" ] = false;
    EXPECT_THROW( extract_witness( as_verdict( dropped ), p ), error );

    auto sum = a;
    sum[ "theta_0_1" ] = R( "0.6" );
    EXPECT_THROW( extract_witness( as_verdict( sum ), p ), error );

    verdict unsat;
    unsat.status = solver_status::unsat;
    EXPECT_THROW( extract_witness( unsat, p ), error );
}

TEST( Witness, IntervalViolation )
{
    auto p = load_pimc( "fig5.pimc" );
    auto m = std::get< mc >( parse_model( "mc\nstates s0 s1:alpha s2:beta s3:alpha,beta\ninit s0\n"
                                          "s0 -> s2 1\ns1 -> s1 0.6\ns1 -> s3 0.4\n"
                                          "s2 -> s1 0.7\ns2 -> s2 0.3\ns3 -> s3 1\n" ) );
    valuation v{ { "p", R( "0.6" ) }, { "q", R( "0.6" ) } };
    auto r = validate_witness( m, v, p, std::nullopt );
    ASSERT_FALSE( r.ok() );
    EXPECT_TRUE( has_kind( r, "interval" ) );
    EXPECT_NE( r.violations.front().detail.find( "s2 -> s1" ), std::string::npos );

    v[ "p" ] = R( "0.7" );
    EXPECT_TRUE( validate_witness( m, v, p, std::nullopt ).ok() );
}

TEST( Witness, BoundAndStructureViolations )
{
    auto p = load_pimc( "fig5.pimc" );
    auto m = restrict_to( fig7(), { 0, 1, 2, 3 } );
    EXPECT_TRUE( validate_witness( m, half, p, goal::prob( { "beta" }, cmp_op::ge, R( "0.3" ) ) ).ok() );
    auto r = validate_witness( m, half, p, goal::prob( { "beta" }, cmp_op::ge, R( "0.9" ) ) );
    EXPECT_TRUE( has_kind( r, "bound" ) );
    EXPECT_TRUE( has_kind( validate_witness( m, half, p, goal::none_reach( { "beta" } ) ), "bound" ) );
    EXPECT_TRUE( validate_witness( m, half, p, goal::prob_negated( { "beta" }, cmp_op::ge, R( "0.5" ) ) ).ok() );

    auto relabeled = std::get< mc >( parse_model( "mc\nstates s0 s1\ninit s0\ns0 -> s1 1\ns1 -> s1 1\n" ) );
    EXPECT_TRUE( has_kind( validate_witness( relabeled, half, p, std::nullopt ), "structure" ) );

    valuation out{ { "p", R( "2" ) }, { "q", R( "1/2" ) } };
    EXPECT_TRUE( has_kind( validate_witness( m, out, p, std::nullopt ), "interval" ) );
}

TEST( Witness, EquationCheck )
{
    auto p = load_pimc( "fig5.pimc" );
    auto e = encode_quant_reach( p, { "beta" } );
    auto a = induced_assignment( e, p, half, fig7() );
    a[ "pi_0" ] = R( "1/2" );
    auto w = extract_witness( as_verdict( a ), p );
    auto r = validate_witness( w, p, goal::prob( { "beta" }, cmp_op::ge, R( "0.3" ) ) );
    EXPECT_TRUE( has_kind( r, "equation" ) );
}

TEST( Solver, EmptyIntervalIsUnsat )
{
    REQUIRE_SOLVER();
    auto p = pimc_text( "pimc\nparams p\nstates s0 s1 s2\ninit s0\n"
                        "s0 -> s1 [0.6, p]\ns0 -> s2 [0.6, 1]\ns1 -> s1 [1, 1]\ns2 -> s2 [1, 1]\n" );
    auto r = check( p, { problem_kind::consistency, {}, cmp_op::ge, 0 } );
    ASSERT_TRUE( r.result );
    EXPECT_EQ( r.result->status, solver_status::unsat );
    EXPECT_EQ( r.exit, exit_fails );
    EXPECT_FALSE( brute_consistency( p, grid_spec{ 10 } ) );
}

TEST( Solver, Fig5ConsistencyWitnessValidates )
{
    REQUIRE_SOLVER();
    auto p = load_pimc( "fig5.pimc" );
    auto r = check( p, { problem_kind::consistency, {}, cmp_op::ge, 0 } );
    ASSERT_EQ( r.exit, exit_holds ) << r.explanation;
    ASSERT_TRUE( r.wit );
    ASSERT_TRUE( r.validation );
    EXPECT_TRUE( r.validation->ok() );
    for ( state_index s = 0; s < r.wit->chain.state_count(); ++s ) {
        rational sum( 0 );
        for ( const auto& [ _, x ] : r.wit->chain.row( s ) )
            sum += x;
        EXPECT_EQ( sum, 1 );
    }
}

TEST( Solver, Fig5Reachability )
{
    REQUIRE_SOLVER();
    auto p = load_pimc( "fig5.pimc" );
    EXPECT_EQ( check( p, { problem_kind::reach_exists, { "beta" }, cmp_op::ge, 0 } ).exit, exit_holds );
    EXPECT_EQ( check( p, { problem_kind::reach_forall, { "beta" }, cmp_op::ge, 0 } ).exit, exit_fails );

    auto at_least = check( p, { problem_kind::quant_exists, { "beta" }, cmp_op::ge, R( "1/2" ) } );
    ASSERT_EQ( at_least.exit, exit_holds ) << at_least.explanation;
    EXPECT_GE( *at_least.validation->reach, R( "1/2" ) );

    EXPECT_EQ( check( p, { problem_kind::quant_forall, { "beta" }, cmp_op::le, 1 } ).exit, exit_holds );
    auto cex = check( p, { problem_kind::quant_forall, { "beta" }, cmp_op::le, R( "9/10" ) } );
    ASSERT_EQ( cex.exit, exit_fails ) << cex.explanation;
    EXPECT_GT( *cex.validation->reach, R( "9/10" ) );
    EXPECT_EQ( check( p, { problem_kind::quant_exists, { "beta" }, cmp_op::gt, 1 } ).exit, exit_fails );
}

TEST( Solver, EmissionAgreesWithEvaluator )
{
    REQUIRE_SOLVER();
    rng g( 101 );
    auto cfg = configured();
    for ( int round = 0; round < 25; ++round ) {
        csp c;
        c.declare( "x", var_sort::real );
        c.declare( "y", var_sort::real );
        c.declare( "b", var_sort::boolean );
        auto f = random_formula( g, 3 );
        assignment a{ { "x", make_rational( static_cast< long >( g.below( 5 ) ), 4 ) },
                      { "y", make_rational( static_cast< long >( g.below( 5 ) ), 4 ) },
                      { "b", g.chance( 1, 2 ) } };
        c.add( eq( term::var( "x" ), term( std::get< rational >( a[ "x" ] ) ) ), 0, "point" );
        c.add( eq( term::var( "y" ), term( std::get< rational >( a[ "y" ] ) ) ), 0, "point" );
        c.add( std::get< bool >( a[ "b" ] ) ? formula::bvar( "b" ) : !formula::bvar( "b" ), 0, "point" );
        c.add( f, 0, "formula" );
        auto v = run_solver( emit_smtlib( c ), cfg );
        ASSERT_TRUE( v.status == solver_status::sat || v.status == solver_status::unsat ) << v.message;
        EXPECT_EQ( v.status == solver_status::sat, eval( f, a ) ) << f.to_string();
        if ( v.status == solver_status::sat ) {
            EXPECT_FALSE( check_model( c, v ) );
            EXPECT_TRUE( satisfies( c, to_assignment( v ) ) );
        }
    }
}
