use screenforge_core::kind::FieldKind;
use screenforge_core::model::Form;
use screenforge_core::projection::project_form;

/// Save-button law and hidden-data law for one form; panics on violation.
pub fn check_laws(form: &Form) {
    let view = project_form(form);
    assert_eq!(view.save_affordance, form.save.is_some(), "save law on {}", form.id);
    let visible = view.visible_paths();
    for field in form.fields() {
        let hidden_paths: Vec<String> = match field.kind {
            FieldKind::Table => field
                .columns
                .iter()
                .filter(|c| c.hidden || field.hidden)
                .map(|c| format!("{}[*].{}", field.id, c.id))
                .collect(),
            FieldKind::Button => vec![],
            _ if field.hidden => vec![field.id.clone()],
            _ => vec![],
        };
        for path in hidden_paths {
            assert!(view.data_paths.contains(&path), "{path} missing from data payload");
            assert!(!visible.contains(&path), "{path} rendered although hidden");
        }
    }
}
